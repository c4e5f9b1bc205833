"""Model bundle serialization.

A trained stack is a directory: ``stack.json`` holds specs, tag order,
feature layout and scaler parameters; each tag's learned parameters live
in ``models/<tag>.bin``.  The binary layout is flat: an 8-byte
little-endian unsigned count followed by that many little-endian 64-bit
floats.  Structure (shapes, layer sizes) lives in stack.json, so the
float payload is unambiguous.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import ConfigError, ParseError
from .features import (
    CategoryLexicon,
    FeatureAssembler,
    FeatureConfig,
    MinMaxScaler,
    PdtbSidecar,
    Vocabulary,
    WordVectors,
)
from .manifest import atomic_write_bytes, atomic_write_text, dumps_canonical
from .models import BinaryModel, ModelSpec, TagStack

_HEADER = struct.Struct("<Q")


def write_f64(path, values: np.ndarray) -> None:
    flat = np.ascontiguousarray(values, dtype="<f8").ravel()
    atomic_write_bytes(path, _HEADER.pack(flat.size) + flat.tobytes())


def read_f64(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ParseError(f"{path}: truncated parameter file")
    (count,) = _HEADER.unpack_from(data)
    expected = _HEADER.size + 8 * count
    if len(data) != expected:
        raise ParseError(f"{path}: expected {expected} bytes, found {len(data)}")
    return np.frombuffer(data, dtype="<f8", offset=_HEADER.size).copy()


def _pack_model(model: BinaryModel) -> tuple[np.ndarray, dict]:
    p = model.params
    if model.kind == "constant":
        return np.array([p["p"]]), {}
    if model.kind == "logreg":
        return np.concatenate(([p["bias"]], p["weights"])), {}
    if model.kind == "feedforward":
        layers = p["layers"]
        return (
            np.concatenate([a.ravel() for a in layers]),
            {"hidden": [int(h) for h in p["hidden"]]},
        )
    if model.kind == "naive_bayes":
        d = p["log_theta"].shape[1]
        flat = np.concatenate(
            [
                p["log_prior"].ravel(),
                p["log_theta"].ravel(),
                p["log_one_minus_theta"].ravel(),
            ]
        )
        return flat, {"n_features": int(d)}
    if model.kind == "decision_tree":
        n = len(p["feature"])
        flat = np.concatenate(
            [
                p["feature"].astype(np.float64),
                p["threshold"],
                p["left"].astype(np.float64),
                p["right"].astype(np.float64),
                p["value"],
            ]
        )
        return flat, {"n_nodes": int(n)}
    raise ConfigError(f"cannot serialize model kind {model.kind!r}")


def _unpack_model(kind: str, flat: np.ndarray, meta: dict, width: int) -> dict:
    if kind == "constant":
        return {"p": float(flat[0])}
    if kind == "logreg":
        return {"bias": float(flat[0]), "weights": flat[1:]}
    if kind == "feedforward":
        from .models import ff_unpack

        hidden = tuple(meta["hidden"])
        return {"layers": ff_unpack(flat, width, hidden), "hidden": np.asarray(hidden)}
    if kind == "naive_bayes":
        d = meta["n_features"]
        return {
            "log_prior": flat[:2],
            "log_theta": flat[2 : 2 + 2 * d].reshape(2, d),
            "log_one_minus_theta": flat[2 + 2 * d : 2 + 4 * d].reshape(2, d),
        }
    if kind == "decision_tree":
        n = meta["n_nodes"]
        parts = flat.reshape(5, n)
        return {
            "feature": parts[0].astype(np.int64),
            "threshold": parts[1],
            "left": parts[2].astype(np.int64),
            "right": parts[3].astype(np.int64),
            "value": parts[4],
        }
    raise ConfigError(f"cannot deserialize model kind {kind!r}")


def save_stack(stack: TagStack, out_dir) -> None:
    out_dir = Path(out_dir)
    (out_dir / "models").mkdir(parents=True, exist_ok=True)
    asm = stack.assembler

    doc: dict = {
        "format_version": 1,
        "tags": list(stack.tags),
        "config": stack.config.to_dict(),
        "layout": [[b.name, b.offset, b.width] for b in asm.blocks],
        "width": asm.width,
        "metadata": stack.metadata,
    }
    if asm.scaler is not None:
        doc["scaler"] = {
            "mins": asm.scaler.mins.tolist(),
            "maxs": asm.scaler.maxs.tolist(),
        }
    if asm.vocabulary is not None:
        v = asm.vocabulary
        doc["vocabulary"] = {
            "terms": list(v.terms),
            "weighting": v.weighting,
            "dimension": v.dimension,
            "doc_freq": list(v.doc_freq),
            "n_docs": v.n_docs,
        }
    if asm.lexicon is not None:
        doc["lexicon"] = {"entries": asm.lexicon.entries()}
    if asm.word_vectors is not None:
        doc["word_vectors"] = {
            "words": list(asm.word_vectors.words),
            "dimension": asm.word_vectors.dimension,
            "file": "wordvecs.bin",
        }
        write_f64(out_dir / "wordvecs.bin", asm.word_vectors.matrix)
    if asm.pdtb is not None:
        doc["pdtb_inventory"] = list(asm.pdtb.inventory)

    models_doc = {}
    for tag, model in stack.models.items():
        flat, meta = _pack_model(model)
        write_f64(out_dir / "models" / f"{tag}.bin", flat)
        models_doc[tag] = {
            "kind": model.kind,
            "file": f"models/{tag}.bin",
            "input_width": model.input_width,
            "degenerate": model.degenerate,
            "spec": model.spec.to_dict(),
            "meta": meta,
        }
    doc["models"] = models_doc
    atomic_write_text(out_dir / "stack.json", dumps_canonical(doc))


def load_stack(bundle_dir) -> TagStack:
    bundle_dir = Path(bundle_dir)
    path = bundle_dir / "stack.json"
    if not path.is_file():
        raise ParseError(f"not a model bundle (missing {path})")
    doc = json.loads(path.read_text(encoding="utf-8"))
    config = FeatureConfig.from_dict(doc["config"])

    vocabulary = None
    if "vocabulary" in doc:
        v = doc["vocabulary"]
        vocabulary = Vocabulary(
            terms=tuple(v["terms"]),
            weighting=v["weighting"],
            dimension=v["dimension"],
            doc_freq=tuple(v["doc_freq"]),
            n_docs=v["n_docs"],
        )
    lexicon = None
    if "lexicon" in doc:
        lexicon = CategoryLexicon.from_entries(
            (c, p) for c, p in doc["lexicon"]["entries"]
        )
    word_vectors = None
    if "word_vectors" in doc:
        wv = doc["word_vectors"]
        flat = read_f64(bundle_dir / wv["file"])
        word_vectors = WordVectors(
            dimension=wv["dimension"],
            words=tuple(wv["words"]),
            matrix=flat.reshape(len(wv["words"]), wv["dimension"]),
        )
    pdtb = None
    if "pdtb_inventory" in doc:
        pdtb = PdtbSidecar.empty(doc["pdtb_inventory"])
    scaler = None
    if "scaler" in doc:
        scaler = MinMaxScaler(
            mins=np.asarray(doc["scaler"]["mins"], dtype=np.float64),
            maxs=np.asarray(doc["scaler"]["maxs"], dtype=np.float64),
        )

    assembler = FeatureAssembler(
        config=config,
        vocabulary=vocabulary,
        lexicon=lexicon,
        word_vectors=word_vectors,
        pdtb=pdtb,
        scaler=scaler,
    )

    models = {}
    for tag, m in doc["models"].items():
        flat = read_f64(bundle_dir / m["file"])
        models[tag] = BinaryModel(
            spec=ModelSpec.from_dict(m["spec"]),
            kind=m["kind"],
            input_width=m["input_width"],
            params=_unpack_model(m["kind"], flat, m["meta"], m["input_width"]),
            degenerate=m["degenerate"],
        )

    return TagStack(
        tags=tuple(doc["tags"]),
        models=models,
        assembler=assembler,
        metadata=doc.get("metadata", {}),
    )
