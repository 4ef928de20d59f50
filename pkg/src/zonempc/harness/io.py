"""CSV formats (dataset, results, loss curves) and flat key = value config files."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core import Dataset, action_dim, action_labels, state_dim, state_labels


def _num(x) -> str:
    return repr(float(x))


def dataset_header(n_zones: int) -> list[str]:
    return (
        ["s_" + c for c in state_labels(n_zones)]
        + ["a_" + c for c in action_labels(n_zones)]
        + ["ns_" + c for c in state_labels(n_zones)]
        + ["step"]
    )


def write_dataset_csv(dataset: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(dataset_header(dataset.n_zones))
        for s, a, ns, k in zip(dataset.states, dataset.actions, dataset.next_states, dataset.steps):
            w.writerow([_num(v) for v in s] + [_num(v) for v in a] + [_num(v) for v in ns] + [int(k)])


def read_dataset_csv(path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_state = sum(1 for h in header if h.startswith("s_"))
        n_zones = (n_state - 7) // 6
        if dataset_header(n_zones) != header:
            raise ValueError(f"{path}: unexpected dataset header")
        rows = [[float(v) for v in r] for r in reader if r]
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    sd, ad = state_dim(n_zones), action_dim(n_zones)
    return Dataset(
        n_zones,
        arr[:, :sd],
        arr[:, sd : sd + ad],
        arr[:, sd + ad : 2 * sd + ad],
        arr[:, -1].astype(int),
    )


RESULT_FIELDS = ("temp", "pmv", "heat_kwh", "cool_kwh", "heat_sp", "cool_sp")


def results_header(n_zones: int) -> list[str]:
    return ["step"] + [f"zone{i}_{f}" for i in range(n_zones) for f in RESULT_FIELDS] + ["reward"]


@dataclass
class Results:
    """Per-step closed-loop record: the action executed at ``step`` and the
    zone state it produced (energies are those consumed during the step)."""

    step: np.ndarray
    temp: np.ndarray
    pmv: np.ndarray
    heat_kwh: np.ndarray
    cool_kwh: np.ndarray
    heat_sp: np.ndarray
    cool_sp: np.ndarray
    reward: np.ndarray

    @property
    def n_zones(self) -> int:
        return self.temp.shape[1]

    def __len__(self) -> int:
        return len(self.step)

    @classmethod
    def from_trace(cls, trace) -> "Results":
        tr = trace.transitions
        z = lambda f: np.array([[getattr(zz, f) for zz in t.next_state.zones] for t in tr]).reshape(len(tr), -1)
        return cls(
            np.array([t.timestep_index for t in tr], dtype=int),
            z("temp_in"),
            z("pmv"),
            z("heat_energy"),
            z("cool_energy"),
            np.array([t.action.heat_sp for t in tr]).reshape(len(tr), -1),
            np.array([t.action.cool_sp for t in tr]).reshape(len(tr), -1),
            np.asarray(trace.rewards, dtype=float),
        )


def write_results_csv(results: Results, path) -> None:
    n = results.n_zones
    cols = [results.temp, results.pmv, results.heat_kwh, results.cool_kwh, results.heat_sp, results.cool_sp]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(results_header(n))
        for k in range(len(results)):
            row = [int(results.step[k])]
            for i in range(n):
                row += [_num(c[k, i]) for c in cols]
            row.append(_num(results.reward[k]))
            w.writerow(row)


def read_results_csv(path) -> Results:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n = (len(header) - 2) // len(RESULT_FIELDS)
        if header != results_header(n):
            raise ValueError(f"{path}: unexpected results header")
        rows = np.array([[float(v) for v in r] for r in reader if r], dtype=float).reshape(-1, len(header))
    per_zone = rows[:, 1:-1].reshape(len(rows), n, len(RESULT_FIELDS))
    return Results(rows[:, 0].astype(int), *(per_zone[:, :, j] for j in range(len(RESULT_FIELDS))), rows[:, -1])


def write_loss_curves(histories, path) -> None:
    """One row per (model, epoch >= 1)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "epoch", "train_loss", "val_loss"])
        for m, h in enumerate(histories):
            for epoch in range(1, len(h.train)):
                w.writerow([m, epoch, _num(h.train[epoch]), _num(h.val[epoch])])


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def write_config(values: dict, path) -> None:
    lines = [f"{k} = {'' if v is None else v}" for k, v in values.items()]
    Path(path).write_text("\n".join(lines) + "\n")
