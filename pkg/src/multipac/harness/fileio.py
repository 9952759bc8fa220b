"""JSON file formats for classes, distributions, samples, menus and vertex sets."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..core import Distribution, HypothesisClass, InvariantViolation, Menu, Sample

LOAD_TOL = 1e-9


def _read(path) -> dict:
    path = Path(path)
    try:
        with path.open() as fh:
            return json.load(fh)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvariantViolation(f"{path}: not valid JSON ({exc.msg})") from exc


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    return path


def class_to_json(H: HypothesisClass) -> dict:
    return {"n_domain": H.n_domain, "n_labels": H.n_labels, "hypotheses": [list(h) for h in H.members]}


def class_from_json(obj: dict) -> HypothesisClass:
    try:
        return HypothesisClass(int(obj["n_domain"]), int(obj["n_labels"]), tuple(map(tuple, obj["hypotheses"])))
    except KeyError as exc:
        raise InvariantViolation(f"class file is missing {exc}") from exc


def load_class(path) -> HypothesisClass:
    return class_from_json(_read(path))


def save_class(path, H: HypothesisClass) -> Path:
    return write_json(path, class_to_json(H))


def distribution_from_json(obj: dict) -> Distribution:
    n, k = int(obj["n_domain"]), int(obj["n_labels"])
    probs = np.zeros((n, k))
    for x, y, p in obj["probs"]:
        if not (0 <= int(x) < n and 0 <= int(y) < k):
            raise InvariantViolation(f"pair ({x}, {y}) out of range")
        probs[int(x), int(y)] += float(p)
    total = probs.sum()
    if abs(total - 1.0) > LOAD_TOL:
        raise InvariantViolation(f"probabilities sum to {total!r}")
    return Distribution(probs / total)


def load_distribution(path) -> Distribution:
    return distribution_from_json(_read(path))


def save_distribution(path, P: Distribution) -> Path:
    xs, ys = np.nonzero(P.probs)
    rows = [[int(x), int(y), float(P.probs[x, y])] for x, y in zip(xs, ys)]
    return write_json(path, {"n_domain": P.n_domain, "n_labels": P.n_labels, "probs": rows})


def load_sample(path) -> tuple[Sample, int, int]:
    obj = _read(path)
    s = tuple((int(x), int(y)) for x, y in obj["examples"])
    n, k = int(obj["n_domain"]), int(obj["n_labels"])
    for x, y in s:
        if not (0 <= x < n and 0 <= y < k):
            raise InvariantViolation(f"example ({x}, {y}) out of range")
    return s, n, k


def save_sample(path, s, n_domain: int, n_labels: int) -> Path:
    return write_json(path, {"n_domain": n_domain, "n_labels": n_labels, "examples": [list(z) for z in s]})


def load_menu(path) -> Menu:
    obj = _read(path)
    return Menu(int(obj["n_labels"]), tuple(frozenset(s) for s in obj["sets"]))


def save_menu(path, mu: Menu) -> Path:
    return write_json(path, {"n_labels": mu.n_labels, "sets": [sorted(s) for s in mu.sets]})


def load_vertices(path) -> tuple[list[tuple[int, ...]], int]:
    obj = _read(path)
    verts = [tuple(int(c) for c in v) for v in obj["vertices"]]
    return verts, int(obj["n"])
