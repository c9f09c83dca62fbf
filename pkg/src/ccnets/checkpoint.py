"""Versioned JSON checkpoints: config echo, parameter tensors, optimizer
state, and the RNG seed, under the "ccnets-ckpt-v1" format tag."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .baselines import AutoencoderNet, MlpClassifier
from .errors import SchemaError
from .networks import CooperativeTriple, NetworkConfig
from .optim import Adam, AdamState, StepDecaySchedule
from .tensor import Parameter

CHECKPOINT_FORMAT = "ccnets-ckpt-v1"


def _params_payload(params: list[Parameter]) -> list[dict]:
    return [{
        "name": p.name,
        "shape": list(p.data.shape),
        "values": p.data.reshape(-1).tolist(),
    } for p in params]


def _optim_payload(opt: Adam) -> dict:
    out = {}
    for p, s in zip(opt.params, opt.states):
        out[p.name] = {
            "m": s.m.reshape(-1).tolist(),
            "v": s.v.reshape(-1).tolist(),
            "t": s.t,
            "beta1": s.beta1,
            "beta2": s.beta2,
            "eps": s.eps,
        }
    return out


def _restore_params(params: list[Parameter], payload: list[dict]) -> None:
    by_name = {entry["name"]: entry for entry in payload}
    for p in params:
        entry = by_name.get(p.name)
        if entry is None:
            raise SchemaError(f"checkpoint missing parameter {p.name!r}")
        shape = tuple(entry["shape"])
        if shape != p.data.shape:
            raise SchemaError(
                f"checkpoint parameter {p.name!r} has shape {shape}, expected {p.data.shape}"
            )
        p.data = np.array(entry["values"], dtype=np.float64).reshape(shape)


def _restore_optim(opt: Adam, payload: dict) -> None:
    for p, s in zip(opt.params, opt.states):
        entry = payload.get(p.name)
        if entry is None:
            raise SchemaError(f"checkpoint missing optimizer state for {p.name!r}")
        s.m = np.array(entry["m"], dtype=np.float64).reshape(p.data.shape)
        s.v = np.array(entry["v"], dtype=np.float64).reshape(p.data.shape)
        s.t = int(entry["t"])
        s.beta1 = float(entry["beta1"])
        s.beta2 = float(entry["beta2"])
        s.eps = float(entry["eps"])


def _write(path: str | Path, document: dict) -> None:
    document = {"format": CHECKPOINT_FORMAT, **document}
    with open(path, "w") as fh:
        json.dump(document, fh)


def load_checkpoint(path: str | Path) -> dict:
    """Raw checkpoint document; validates the format tag."""
    with open(path) as fh:
        document = json.load(fh)
    if document.get("format") != CHECKPOINT_FORMAT:
        raise SchemaError(
            f"{path}: format tag {document.get('format')!r}, expected {CHECKPOINT_FORMAT!r}"
        )
    return document


def save_triple(triple: CooperativeTriple, path: str | Path, net_cfg: NetworkConfig,
                seed: int = 0, extra_config: dict | None = None) -> None:
    document = {
        "model_kind": "cooperative_triple",
        "seed": seed,
        "config": {
            "network": asdict(net_cfg),
            "schedules": {name: asdict(sched) for name, sched in triple.schedules.items()},
            **(extra_config or {}),
        },
        "parameters": _params_payload(triple.params()),
        "optimizer": {name: _optim_payload(opt) for name, opt in triple.optimizers.items()},
    }
    _write(path, document)


def load_triple(path: str | Path) -> tuple[CooperativeTriple, dict]:
    document = load_checkpoint(path)
    if document["model_kind"] != "cooperative_triple":
        raise SchemaError(f"{path}: checkpoint holds {document['model_kind']!r}, "
                          f"expected 'cooperative_triple'")
    cfg = NetworkConfig(**document["config"]["network"])
    schedules = {name: StepDecaySchedule(**entry)
                 for name, entry in document["config"]["schedules"].items()}
    triple = CooperativeTriple.build(cfg, seed=document["seed"], schedules=schedules)
    _restore_params(triple.params(), document["parameters"])
    for name, opt in triple.optimizers.items():
        _restore_optim(opt, document["optimizer"][name])
    return triple, document["config"]


def save_autoencoder(net: AutoencoderNet, path: str | Path, seed: int = 0,
                     opt: Adam | None = None) -> None:
    document = {
        "model_kind": "autoencoder",
        "seed": seed,
        "config": {"observe_size": net.observe_size, "latent_size": net.latent_size},
        "parameters": _params_payload(net.params()),
        "optimizer": _optim_payload(opt) if opt is not None else {},
        "history": net.history,
    }
    _write(path, document)


def load_autoencoder(path: str | Path) -> AutoencoderNet:
    document = load_checkpoint(path)
    if document["model_kind"] != "autoencoder":
        raise SchemaError(f"{path}: checkpoint holds {document['model_kind']!r}, "
                          f"expected 'autoencoder'")
    cfg = document["config"]
    net = AutoencoderNet(cfg["observe_size"], latent_size=cfg["latent_size"],
                         seed=document["seed"])
    _restore_params(net.params(), document["parameters"])
    net.history = list(document.get("history", []))
    return net


def save_mlp(net: MlpClassifier, path: str | Path, seed: int = 0,
             opt: Adam | None = None) -> None:
    document = {
        "model_kind": "mlp_classifier",
        "seed": seed,
        "config": {"input_size": net.input_size},
        "parameters": _params_payload(net.params()),
        "optimizer": _optim_payload(opt) if opt is not None else {},
        "history": net.history,
    }
    _write(path, document)


def load_mlp(path: str | Path) -> MlpClassifier:
    document = load_checkpoint(path)
    if document["model_kind"] != "mlp_classifier":
        raise SchemaError(f"{path}: checkpoint holds {document['model_kind']!r}, "
                          f"expected 'mlp_classifier'")
    net = MlpClassifier(document["config"]["input_size"], seed=document["seed"])
    _restore_params(net.params(), document["parameters"])
    net.history = list(document.get("history", []))
    return net


def state_digest(params: list[Parameter]) -> str:
    """SHA-256 over all parameter bytes, for mutation/determinism checks."""
    h = hashlib.sha256()
    for p in params:
        h.update(p.name.encode())
        h.update(np.ascontiguousarray(p.data).tobytes())
    return h.hexdigest()
