#!/usr/bin/env python3
"""Convert the Planetoid Citeseer files into the edge-list + binary-feature
layout the nodedup loader reads.

    python tools/convert_citeseer.py RAW_DIR data/citeseer

RAW_DIR holds ind.citeseer.{x,tx,allx,graph,test.index}. Test indices that
are missing from the raw graph get zero feature rows, giving 3327 nodes.
"""

import argparse
import hashlib
import pickle
import struct
import sys
from pathlib import Path

import numpy as np


def load_pickle(path):
    with open(path, "rb") as f:
        return pickle.load(f, encoding="latin1")


def dense(m):
    return np.asarray(m.todense() if hasattr(m, "todense") else m, dtype=np.float32)


def convert(raw: Path, out: Path):
    allx = dense(load_pickle(raw / "ind.citeseer.allx"))
    tx = dense(load_pickle(raw / "ind.citeseer.tx"))
    graph = load_pickle(raw / "ind.citeseer.graph")
    test_index = [int(line) for line in (raw / "ind.citeseer.test.index").read_text().split()]

    n = max(test_index) + 1
    features = np.zeros((n, allx.shape[1]), dtype=np.float32)
    features[: allx.shape[0]] = allx
    # Row i of tx belongs to node test_index[i].
    features[np.asarray(test_index)] = tx

    edges = set()
    for u, nbrs in graph.items():
        for v in nbrs:
            if u != v and u < n and v < n:
                edges.add((min(u, v), max(u, v)))
    edges = sorted(edges)

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "edges.txt", "w") as f:
        for u, v in edges:
            f.write(f"{u}\t{v}\n")
    with open(out / "features.bin", "wb") as f:
        f.write(struct.pack("<II", n, features.shape[1]))
        f.write(features.astype("<f4").tobytes())
    for name in ("edges.txt", "features.bin"):
        digest = hashlib.sha256((out / name).read_bytes()).hexdigest()
        print(f"{name}\t{digest}")
    print(f"nodes {n}  edges {len(edges)}  features {features.shape[1]}", file=sys.stderr)


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("raw_dir", type=Path)
    p.add_argument("out_dir", type=Path)
    a = p.parse_args()
    convert(a.raw_dir, a.out_dir)


if __name__ == "__main__":
    main()
