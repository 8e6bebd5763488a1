"""Corpus access shared by the test modules."""

from __future__ import annotations

import glob
import json
import os

from globalnec.corpus import corpus_root
from globalnec.proofcheck import parse_proof


def corpus_proofs():
    """(path, proof, expected verdict or None) for every corpus proof file."""
    out = []
    for path in sorted(glob.glob(os.path.join(corpus_root(), "*", "*.proof"))):
        with open(os.path.join(os.path.dirname(path), "expect.json")) as fh:
            checks = json.load(fh)["checks"]
        name = os.path.basename(path)
        verdict = next((c["verdict"] for c in checks if c["check"] == "proof" and c["file"] == name), None)
        with open(path) as fh:
            out.append((path, parse_proof(fh.read()), verdict))
    return out
