#!/usr/bin/env python3
"""Convert the raw Cora release (cora.content / cora.cites) to sgcl text files.

By default only the largest connected component is kept (2485 nodes, 5069
undirected edges, 7 classes). Node order follows cora.content; class ids are
assigned in sorted order of the class names.

    python3 tools/cora_to_sgcl.py --raw path/to/cora --out data/cora
"""
import argparse
import os
from collections import deque


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--raw", required=True, help="directory with cora.content and cora.cites")
    ap.add_argument("--out", required=True)
    ap.add_argument("--full", action="store_true", help="keep all 2708 nodes instead of the largest component")
    args = ap.parse_args()

    papers, feats, classes = [], [], []
    with open(os.path.join(args.raw, "cora.content")) as f:
        for line in f:
            tok = line.split()
            papers.append(tok[0])
            feats.append(tok[1:-1])
            classes.append(tok[-1])
    index = {p: i for i, p in enumerate(papers)}
    n = len(papers)
    adj = [set() for _ in range(n)]
    with open(os.path.join(args.raw, "cora.cites")) as f:
        for line in f:
            a, b = line.split()
            u, v = index[a], index[b]
            if u != v:
                adj[u].add(v)
                adj[v].add(u)

    keep = list(range(n))
    if not args.full:
        comp = [-1] * n
        best, best_size, c = -1, 0, 0
        for s in range(n):
            if comp[s] >= 0:
                continue
            comp[s], size, q = c, 0, deque([s])
            while q:
                u = q.popleft()
                size += 1
                for v in adj[u]:
                    if comp[v] < 0:
                        comp[v] = c
                        q.append(v)
            if size > best_size:
                best, best_size = c, size
            c += 1
        keep = [u for u in range(n) if comp[u] == best]
    local = {u: i for i, u in enumerate(keep)}
    edges = sorted({(min(local[u], local[v]), max(local[u], local[v]))
                    for u in keep for v in adj[u] if v in local})
    names = sorted(set(classes[u] for u in keep))
    cid = {c: i for i, c in enumerate(names)}

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "graph.txt"), "w", newline="\n") as f:
        f.write(f"{len(keep)} {len(edges)}\n")
        f.writelines(f"{u} {v}\n" for u, v in edges)
    with open(os.path.join(args.out, "features.txt"), "w", newline="\n") as f:
        f.write(f"{len(keep)} {len(feats[0])}\n")
        f.writelines(" ".join(feats[u]) + "\n" for u in keep)
    with open(os.path.join(args.out, "labels.txt"), "w", newline="\n") as f:
        f.writelines(f"{cid[classes[u]]}\n" for u in keep)
    print(f"wrote {len(keep)} nodes, {len(edges)} edges, {len(feats[0])} features, {len(names)} classes")


if __name__ == "__main__":
    main()
