"""Command-line driver: spectrum/commutator/coherent/order/pdo/report.

Configuration comes from defaults, then an optional flat key=value config
file, then command-line flags (flags win).  All numeric output is formatted
to 17 significant digits so identical configs produce byte-identical files.
Exit codes: 0 all checks pass, 1 a check failed, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import coherent, isospectral, ladder, pdo, report
from .fock import FOCK, apply_operator, commutator, hermitian_eigensystem, interior_block
from .numerics import build_grid

__all__ = ["RunConfig", "ConfigError", "main"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2


class ConfigError(ValueError):
    """Invalid run configuration; the message names the violated constraint."""


@dataclass
class RunConfig:
    lam: float = 2.0
    trunc: int = 64
    weights_kind: str = "distorted"
    w: float = 1.0
    q: float = 0.5
    nu: float | None = None
    zeta_re: float = 1.0
    zeta_im: float = 0.5
    out: str | None = None
    fmt: str = "json"
    custom: tuple = ()

    @property
    def zeta(self) -> complex:
        return complex(self.zeta_re, self.zeta_im)

    def weights(self) -> ladder.WeightSequence:
        kind = self.weights_kind
        try:
            if kind == "constant":
                return ladder.constant_weights(self.w)
            if kind == "distorted":
                return ladder.distorted_weights(self.w)
            if kind == "linear":
                if self.nu is not None and self.nu != 1.0:
                    return ladder.power_law_weights(self.nu)
                return ladder.linear_weights()
            if kind == "single":
                return ladder.single_weight(self.w)
            if kind == "geometric":
                return ladder.geometric_weights(self.q)
            if kind == "custom":
                if not self.custom:
                    raise ConfigError("custom weights need `custom = w1,w2,...` in the config file")
                return ladder.custom_weights(self.custom)
        except ladder.WeightError as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError(
            f"unknown weights kind {kind!r}; expected constant|distorted|linear|single|geometric|custom"
        )

    def validate(self):
        if self.trunc < 8:
            raise ConfigError(f"truncation must be >= 8, got {self.trunc}")
        if abs(self.lam) <= math.sqrt(math.pi) / 2 + 1e-6:
            raise ConfigError(
                f"|lambda| must exceed sqrt(pi)/2 + 1e-6 = {math.sqrt(math.pi) / 2 + 1e-6:.7f}, got {self.lam}"
            )
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")
        self.weights()


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(v) -> str:
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, complex):
        return '{"re": %s, "im": %s}' % (fmt_float(v.real), fmt_float(v.imag))
    if isinstance(v, (float, np.floating)):
        if math.isfinite(v):
            return fmt_float(v)
        return _json_value(fmt_float(v))  # inf/nan as strings: valid JSON stays valid
    if isinstance(v, dict):
        inner = ", ".join(f"{_json_value(str(k))}: {_json_value(val)}" for k, val in v.items())
        return "{" + inner + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(item) for item in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def to_json(obj) -> str:
    return _json_value(obj) + "\n"


def to_csv(header: list, rows: list) -> str:
    def cell(v):
        if isinstance(v, (float, np.floating)):
            return fmt_float(v)
        return str(v)

    lines = [",".join(header)]
    lines += [",".join(cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _emit(config: RunConfig, name: str, text: str):
    if config.out:
        path = Path(config.out)
        path.mkdir(parents=True, exist_ok=True)
        target = path / f"{name}.{config.fmt}"
        target.write_bytes(text.encode("utf-8"))
        print(str(target))
    else:
        sys.stdout.write(text)


def cmd_spectrum(config: RunConfig) -> int:
    N = config.trunc
    params = isospectral.IsospectralParams(config.lam)
    grid = build_grid(N)
    basis = isospectral.theta_wavefunctions(params, grid, N)
    u = isospectral.u_matrix(basis)
    h_tilde = isospectral.h_tilde_matrix(basis)
    evals, _ = hermitian_eigensystem(h_tilde)
    gram = basis.theta @ (grid.weights[None, :] * basis.theta).T
    interior = max(N - 5, 1)
    rows = []
    ok = True
    u_dev_mat = np.abs(u.mat - np.eye(N))
    for n in range(min(40, interior)):
        deviation = abs(float(evals[n]) - n)
        orth = float(np.max(np.abs(gram[n, :interior] - np.eye(N)[n, :interior])))
        u_dev = float(np.max(u_dev_mat[n, :interior]))
        ok = ok and deviation < 1e-6 and orth < 1e-8
        rows.append([n, float(evals[n]), deviation, orth, u_dev])
    if config.fmt == "csv":
        text = to_csv(["n", "eigenvalue", "deviation", "orthonormality_residual", "u_row_dev"], rows)
    else:
        text = to_json({
            "lambda": config.lam,
            "trunc": N,
            "rows": [
                {"n": r[0], "eigenvalue": r[1], "deviation": r[2],
                 "orthonormality_residual": r[3], "u_row_dev": r[4]}
                for r in rows
            ],
            "pass": ok,
        })
    _emit(config, "spectrum", text)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_commutator(config: RunConfig) -> int:
    N = config.trunc
    weights = config.weights()
    params = isospectral.IsospectralParams(config.lam)
    grid = build_grid(N)
    basis = isospectral.theta_wavefunctions(params, grid, N)
    u = isospectral.u_matrix(basis)
    target = np.zeros(N)
    target[1:] = weights.weight_array(N - 1)

    def block(comm_mat):
        inner = interior_block(comm_mat)
        k = inner.shape[0]
        tgt = target[:k]
        scale = np.maximum(1.0, np.abs(tgt))
        diag = np.real(np.diag(inner))
        resid = float(np.max(np.abs(diag - tgt) / scale))
        off = float(np.max(np.abs(inner - np.diag(np.diag(inner)))))
        return {
            "diagonal": [float(v) for v in diag],
            "target": [float(v) for v in tgt],
            "residual": resid,
            "offdiagonal_max": off,
        }

    low, high = ladder.ladder_matrices(weights, N, FOCK)
    fock_block = block(commutator(low, high).mat)
    low_t = ladder.transport_to_theta(low, u, basis.tag)
    high_t = ladder.transport_to_theta(high, u, basis.tag)
    comm_theta = ladder.represent_in_theta(commutator(low_t, high_t), u, basis.tag)
    theta_block = block(comm_theta.mat)
    ok = fock_block["residual"] < 1e-12 and theta_block["residual"] < 1e-6
    text = to_json({
        "weights": weights.label(),
        "lambda": config.lam,
        "trunc": N,
        "fock": fock_block,
        "theta": theta_block,
        "pass": ok,
    })
    _emit(config, "commutator", text)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_coherent(config: RunConfig) -> int:
    weights = config.weights()
    zeta = config.zeta
    sizes = sorted({48, 64, 96, config.trunc})
    rows = []
    for N in sizes:
        low, _ = ladder.ladder_matrices(weights, N, FOCK)
        cs = coherent.cs_vector(coherent.CSSpec(zeta, weights, N), FOCK)
        moved = apply_operator(low, cs)
        rows.append({"N": N, "residual": float(np.linalg.norm(moved.coeffs - zeta * cs.coeffs))})
    ok = rows[-1]["residual"] < 1e-6
    text = to_json({
        "weights": weights.label(),
        "zeta": zeta,
        "residual_vs_truncation": rows,
        "pass": ok,
    })
    _emit(config, "coherent", text)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_order(config: RunConfig) -> int:
    weights = config.weights()
    est = coherent.order_estimate(weights)
    text = to_json({
        "weights": weights.label(),
        "entire": est.entire,
        "rho": est.rho if est.rho is not None else None,
        "radius": est.radius,
        "diagnostics": {k: v for k, v in sorted(est.diagnostics.items())},
    })
    _emit(config, "order", text)
    return EXIT_OK


def cmd_pdo(config: RunConfig) -> int:
    w = Fraction(str(config.w))
    checks = []
    low, high = pdo.expand_ladder_case_ii(w=w, depth=6)
    ref_low, ref_high = pdo.case_ii_reference(w=w)
    checks.append(("lowering_reference_through_d-2", pdo.series_agree_through(low, ref_low, -2)))
    checks.append(("raising_reference_through_d-2", pdo.series_agree_through(high, ref_high, -2)))
    rep = pdo.product_identities(w=w, depth=6)
    checks.append(("lowering_raising_product_identity", rep["a1_a1dag_ok"]))
    checks.append(("raising_lowering_product_identity", rep["a1dag_a1_ok"]))
    prefactor, bracket = pdo.inv_sqrt_one_plus_h(8)
    want_m3 = (pdo.CoeffPoly.x(2) + pdo.CoeffPoly.scalar(pdo.SymbolicScalar.rational(1))) * Fraction(1, 2)
    want_m4 = pdo.CoeffPoly.x() * Fraction(-3, 2)
    checks.append(("inv_sqrt_bracket_d-3", bracket.coefficient(-3) == want_m3))
    checks.append(("inv_sqrt_bracket_d-4", bracket.coefficient(-4) == want_m4))
    ok = all(flag for _, flag in checks)
    text = to_json({
        "w": config.w,
        "checks": [{"name": name, "verdict": "PASS" if flag else "FAIL"} for name, flag in checks],
        "prefactor": prefactor.render(),
        "lowering_series": low.render().split("\n"),
        "raising_series": high.render().split("\n"),
        "pass": ok,
    })
    _emit(config, "pdo", text)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_report(config: RunConfig) -> int:
    results = report.run_all(lam=config.lam, trunc=config.trunc)
    entries = []
    for r in results:
        # wall-clock times stay out of the document: identical configs must
        # produce byte-identical bytes
        entries.append({
            "name": r.name,
            "measured": r.measured,
            "threshold": r.threshold,
            "pass": r.passed,
            "parts": [
                {"name": label, "measured": value, "threshold": tol, "pass": ok}
                for label, value, tol, ok in r.parts
            ],
        })
    all_pass = all(r.passed for r in results)
    text = to_json({
        "lambda": config.lam,
        "trunc": config.trunc,
        "criteria": entries,
        "all_pass": all_pass,
    })
    _emit(config, "report", text)
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


COMMANDS = {
    "spectrum": cmd_spectrum,
    "commutator": cmd_commutator,
    "coherent": cmd_coherent,
    "order": cmd_order,
    "pdo": cmd_pdo,
    "report": cmd_report,
}


def read_config_file(path: str) -> dict:
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_FILE_KEYS = {
    "lambda": ("lam", float),
    "trunc": ("trunc", int),
    "weights": ("weights_kind", str),
    "w": ("w", float),
    "q": ("q", float),
    "nu": ("nu", float),
    "zeta_re": ("zeta_re", float),
    "zeta_im": ("zeta_im", float),
    "out": ("out", str),
    "format": ("fmt", str),
    "custom": ("custom", lambda s: tuple(float(v) for v in s.split(","))),
}


def build_config(args) -> RunConfig:
    config = RunConfig()
    if args.config:
        for key, value in read_config_file(args.config).items():
            if key not in _FILE_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            attr, conv = _FILE_KEYS[key]
            try:
                setattr(config, attr, conv(value))
            except ValueError as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from exc
    for attr, flag in (
        ("lam", "lam"), ("trunc", "trunc"), ("weights_kind", "weights"),
        ("w", "w"), ("q", "q"), ("nu", "nu"),
        ("zeta_re", "zeta_re"), ("zeta_im", "zeta_im"),
        ("out", "out"), ("fmt", "format"),
    ):
        value = getattr(args, flag)
        if value is not None:
            setattr(config, attr, value)
    config.validate()
    return config


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=float, default=None,
                        help="family parameter (default 2)")
    common.add_argument("--trunc", type=int, default=None, help="truncation size N (default 64)")
    common.add_argument("--weights", default=None,
                        choices=["constant", "distorted", "linear", "single", "geometric", "custom"])
    common.add_argument("--w", type=float, default=None, help="weight parameter w")
    common.add_argument("--q", type=float, default=None, help="deformation parameter q")
    common.add_argument("--nu", type=float, default=None, help="power-law exponent for --weights linear")
    common.add_argument("--zeta-re", dest="zeta_re", type=float, default=None)
    common.add_argument("--zeta-im", dest="zeta_im", type=float, default=None)
    common.add_argument("--out", default=None, help="output directory (default: stdout)")
    common.add_argument("--format", dest="format", default=None, choices=["csv", "json"])
    common.add_argument("--config", default=None, help="flat key = value config file")

    parser = argparse.ArgumentParser(prog="isoladder",
                                     description="isospectral-oscillator ladder toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="theta spectrum and orthonormality report")
    sub.add_parser("commutator", parents=[common], help="ladder commutator diagnostics")
    sub.add_parser("coherent", parents=[common], help="coherent-state eigen-residual vs truncation")
    sub.add_parser("order", parents=[common], help="entire-function order / radius estimate")
    sub.add_parser("pdo", parents=[common], help="pseudo-differential golden identities")
    sub.add_parser("report", parents=[common], help="full acceptance battery")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
    except (ConfigError, isospectral.ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    try:
        return COMMANDS[args.command](config)
    except (ConfigError, isospectral.ParameterError, ladder.WeightError,
            coherent.DivergenceError, coherent.TruncationError,
            coherent.WeightSequenceTooShort) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
