"""Text formats: game documents (JSON), trajectories (JSON lines), sweeps (CSV).

Players are 1-based in every document.  Numbers are strings: ``%.17g`` in
floating mode, ``p/q`` in exact mode; caps may be the token ``"unbounded"``.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import math
from dataclasses import asdict

import numpy as np

from .arith import format_number, to_fraction
from .errors import NetGameError, ParseError
from .game import Game, Network

FLOAT = "float"
EXACT = "exact"


def _number(value, exact: bool) -> str:
    return format_number(value, exact)


def game_to_dict(game: Game, label: str | None = None) -> dict:
    exact = game.exact
    doc = {
        "n": game.n,
        "mode": EXACT if exact else FLOAT,
        "weights": [_number(v, exact) for v in game.weights.ravel()],
        "targets": [_number(v, exact) for v in game.targets],
        "caps": [_number(v, exact) for v in game.caps],
    }
    if label is not None:
        doc["label"] = label
    return doc


def serialize_game(game: Game, label: str | None = None) -> str:
    return json.dumps(game_to_dict(game, label), indent=2, sort_keys=True) + "\n"


def _parse_number(token, exact: bool, allow_unbounded: bool = False):
    if isinstance(token, str) and token.strip().lower() == "unbounded":
        if not allow_unbounded:
            raise ParseError("'unbounded' is only allowed for caps")
        return math.inf
    if isinstance(token, bool) or not isinstance(token, (str, int, float)):
        raise ParseError(f"not a number: {token!r}")
    try:
        if exact:
            return to_fraction(token)
        if isinstance(token, str) and "/" in token:
            return float(to_fraction(token))
        value = float(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a number: {token!r}") from exc
    if not math.isfinite(value):
        raise ParseError(f"non-finite number {token!r}")
    return value


def game_from_dict(doc: dict, exact: bool | None = None) -> tuple[Game, str | None]:
    if not isinstance(doc, dict):
        raise ParseError("game document must be a JSON object")
    try:
        n = doc["n"]
        weights = doc["weights"]
        targets = doc["targets"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError("n must be a positive integer")
    mode = doc.get("mode", FLOAT)
    if mode not in (FLOAT, EXACT):
        raise ParseError(f"mode must be {FLOAT!r} or {EXACT!r}")
    if exact is None:
        exact = mode == EXACT
    caps = doc.get("caps", ["unbounded"] * n)
    for name, values, size in (("weights", weights, n * n), ("targets", targets, n), ("caps", caps, n)):
        if not isinstance(values, list) or len(values) != size:
            raise ParseError(f"{name} must be a list of {size} entries")
    W = [[_parse_number(weights[i * n + j], exact) for j in range(n)] for i in range(n)]
    t = [_parse_number(v, exact) for v in targets]
    c = [_parse_number(v, exact, allow_unbounded=True) for v in caps]
    try:
        game = Game(Network(W, exact=exact), t, c, exact=exact)
    except (ValueError, NetGameError) as exc:
        raise ParseError(str(exc)) from exc
    label = doc.get("label")
    return game, label


def parse_game(text: str, exact: bool | None = None) -> tuple[Game, str | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return game_from_dict(doc, exact)


def load_game(path, exact: bool | None = None) -> tuple[Game, str | None]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_game(text, exact)


def save_game(path, game: Game, label: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_game(game, label))


def game_digest(game_or_text, label: str | None = None) -> str:
    """SHA-256 of the canonical serialization (label included)."""
    if isinstance(game_or_text, Game):
        text = serialize_game(game_or_text, label)
    else:
        game, label = parse_game(game_or_text)
        text = serialize_game(game, label)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def format_profile(x, exact: bool) -> list[str]:
    return [_number(v, exact) for v in x]


def parse_profile(text: str, exact: bool) -> list:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    return [_parse_number(p.strip(), exact) for p in parts]


# ---------------------------------------------------------------- trajectories


def verdict_to_dict(verdict, exact: bool) -> dict:
    name = verdict.name
    if name == "converged":
        return {"verdict": name, "period": verdict.period, "profile": format_profile(verdict.profile, exact)}
    if name == "cycle":
        return {"verdict": name, "entry": verdict.entry, "length": verdict.length,
                "profile": format_profile(verdict.profile, exact)}
    return {"verdict": name, "period": verdict.period}


def trajectory_lines(trajectory, game: Game, seed=None, timestamp: bool = True,
                     label: str | None = None) -> list[str]:
    """Header, one line per update, footer."""
    exact = game.exact
    header = {
        "type": "header",
        "digest": game_digest(game, label),
        "spec": trajectory.metadata.get("spec"),
        "schedule": trajectory.metadata.get("schedule"),
        "seed": seed,
        "initial": format_profile(trajectory.initial, exact),
        "mode": EXACT if exact else FLOAT,
    }
    if label is not None:
        header["label"] = label
    if timestamp:
        header["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    lines = [json.dumps(header, sort_keys=True)]
    for r in trajectory.records:
        rec = {"type": "update", "period": r.period, "player": r.player + 1,
               "profile": format_profile(r.profile, exact), "best_response": _number(r.best_response, exact)}
        if r.potential is not None:
            rec["potential"] = _number(r.potential, exact and not isinstance(r.potential, float))
        lines.append(json.dumps(rec, sort_keys=True))
    footer = {"type": "footer", "updates": len(trajectory.records)}
    footer.update(verdict_to_dict(trajectory.verdict, exact))
    lines.append(json.dumps(footer, sort_keys=True))
    return lines


def write_trajectory(fh, trajectory, game: Game, seed=None, timestamp: bool = True, label=None) -> None:
    for line in trajectory_lines(trajectory, game, seed, timestamp, label):
        fh.write(line + "\n")


def read_trajectory(text: str) -> tuple[dict, list[dict], dict]:
    rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    if len(rows) < 2 or rows[0].get("type") != "header" or rows[-1].get("type") != "footer":
        raise ParseError("trajectory must start with a header and end with a footer")
    return rows[0], rows[1:-1], rows[-1]


# ---------------------------------------------------------------- reports and tables


def scaling_to_list(a, exact: bool | None = None):
    if a is None:
        return None
    vals = a.values
    ex = a.exact if exact is None else exact
    return [_number(v, ex) for v in vals]


def classification_to_dict(report) -> dict:
    est = report.spectral
    return {
        "n": report.n,
        "sign_symmetric": report.sign_symmetric,
        "symmetrizable": report.symmetrizable,
        "symmetrize_witness": scaling_to_list(report.symmetrize_witness),
        "weak_influences": report.weak_influences,
        "weak_externalities": report.weak_externalities,
        "weak_influences_witness": scaling_to_list(report.influences_witness),
        "weak_externalities_witness": scaling_to_list(report.externalities_witness),
        "dan": report.dan,
        "dan_order": None if report.dan_permutation is None else [i + 1 for i in report.dan_permutation],
        "amplifying_links": [[i + 1, j + 1] for i, j in report.amplifying_links],
        "spectral_radius": {"value": f"{est.value:.17g}", "lower": f"{est.lower:.17g}",
                            "upper": f"{est.upper:.17g}", "status": report.spectral_status},
        "boundary_rows": [i + 1 for i in report.boundary_rows],
        "boundary_columns": [j + 1 for j in report.boundary_columns],
    }


SWEEP_FIELDS = ["n", "trials", "hits", "three_group_hits", "parasite_hits", "frequency",
                "ci_low", "ci_high", "standard_error", "lower_bound"]


def write_sweep(fh, rows, bounds=None) -> None:
    writer = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    for k, row in enumerate(rows):
        d = asdict(row)
        d["lower_bound"] = "" if bounds is None else f"{bounds[k]:.17g}"
        for key in ("frequency", "ci_low", "ci_high", "standard_error"):
            d[key] = f"{d[key]:.17g}"
        writer.writerow(d)


def network_to_rows(W) -> list[list[str]]:
    W = np.asarray(W)
    exact = W.dtype == object
    return [[_number(v, exact) for v in row] for row in W]
