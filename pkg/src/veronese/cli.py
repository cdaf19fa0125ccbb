"""Command-line entry point.

Exit codes: 0 success, 1 violation (or missing witness) found, 2 precision
exhausted, 3 invalid configuration.
"""

from __future__ import annotations

import argparse
import configparser
import io
import os
import sys
from dataclasses import dataclass, field

from . import construct, contfrac, dual, exponents, formulas, simul
from .errors import InvalidSpec, NoApplicableResult, PrecisionExhausted, VeroneseError
from .exactnum import (
    DoublyExponential,
    Explicit,
    GeometricCeil,
    LacunarySpec,
    RealHandle,
    as_rat,
)
from .serialize import dumps, samples_csv

EXIT_OK, EXIT_VIOLATION, EXIT_PRECISION, EXIT_CONFIG = 0, 1, 2, 3
WORKERS_ENV = "VERONESE_WORKERS"


# ---------------------------------------------------------------------------
# number specifications


def _kv(body: str) -> dict[str, str]:
    out = {}
    for part in filter(None, body.split(",")):
        if "=" not in part:
            raise InvalidSpec(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _int(s: str) -> int:
    """Integers, also written as ``a^b`` or ``a**b``."""
    s = s.strip().replace("**", "^")
    try:
        if "^" in s:
            a, b = s.split("^", 1)
            return int(a) ** int(b)
        return int(s)
    except ValueError:
        raise InvalidSpec(f"not an integer: {s!r}") from None


def parse_number(text: str):
    """Parse ``kind:params`` into ``(handle, certificate or None)``.

    Kinds: ``rational:p/q``, ``bugeaud:alpha=..,tau=..``,
    ``meinsatz:b=..,k=..,rho=..[,coeff=..]``, and
    ``lacunary:b=..,c=..`` with one of ``q=..[,alpha=..]``,
    ``terms=a;b;c[,ratio=..]`` or ``doubly=outer^inner``.
    """
    if ":" not in text:
        raise InvalidSpec(f"number spec needs a kind prefix: {text!r}")
    kind, body = text.split(":", 1)
    kind = kind.strip().lower()
    try:
        if kind == "rational":
            return RealHandle.rational(as_rat(body.strip())), None
        p = _kv(body)
        if kind == "bugeaud":
            cert = construct.bugeaud_number(p.get("alpha", "1"), p["tau"])
            return cert.handle, cert
        if kind == "meinsatz":
            cert = construct.meinsatz_number(_int(p["b"]), _int(p["k"]), p["rho"], coeff=_int(p.get("coeff", "1")))
            return cert.handle, cert
        if kind == "lacunary":
            b, c = _int(p["b"]), _int(p.get("c", "1"))
            if "q" in p:
                rule = GeometricCeil(p.get("alpha", "1"), p["q"])
            elif "terms" in p:
                rule = Explicit(tuple(_int(t) for t in p["terms"].split(";")), p.get("ratio"))
            elif "doubly" in p:
                outer, inner = (p["doubly"].split("^") + ["2"])[:2]
                rule = DoublyExponential(_int(outer), _int(inner))
            else:
                raise InvalidSpec("lacunary spec needs q=, terms= or doubly=")
            return RealHandle.lacunary(LacunarySpec(b, c, rule)), None
    except KeyError as exc:
        raise InvalidSpec(f"number spec {text!r} is missing {exc.args[0]!r}") from None
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidSpec(f"bad number spec {text!r}: {exc}") from None
    raise InvalidSpec(f"unknown number kind {kind!r}")


def parse_scales(text: str) -> list[int]:
    return [_int(s) for s in text.split(",") if s.strip()]


# ---------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    """One invocation: ``command``, optional ``target`` and string-valued ``params``."""

    command: str
    target: str | None = None
    params: dict[str, str] = field(default_factory=dict)
    workers: int = 1
    fmt: str = "json"
    evidence: bool = False

    def validate(self) -> None:
        if self.workers < 1:
            raise InvalidSpec("workers must be positive")
        if self.fmt not in ("json", "csv", "text"):
            raise InvalidSpec(f"unknown output format {self.fmt!r}")
        for key in ("cap", "xmax", "depth", "max_deepen"):
            if key in self.params and _int(self.params[key]) < 1:
                raise InvalidSpec(f"{key} must be positive")
        if "tolerance" in self.params:
            t = float(self.params["tolerance"])
            if not 0 < t < 1:
                raise InvalidSpec("tolerance must lie in (0, 1)")

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["run"] = {"command": self.command, "target": self.target or "", "workers": str(self.workers),
                     "format": self.fmt, "evidence": "yes" if self.evidence else "no"}
        cp["params"] = dict(sorted(self.params.items()))
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string(text)
            run = cp["run"]
            cfg = cls(run["command"], run.get("target") or None,
                      dict(cp["params"]) if cp.has_section("params") else {},
                      run.getint("workers", 1), run.get("format", "json"), run.getboolean("evidence", False))
        except (configparser.Error, KeyError, ValueError) as exc:
            raise InvalidSpec(f"invalid config file: {exc}") from None
        cfg.validate()
        return cfg


# ---------------------------------------------------------------------------
# command implementations


def _need(params, key):
    if key not in params:
        raise InvalidSpec(f"missing parameter --{key.replace('_', '-')}")
    return params[key]


def _number(params):
    return parse_number(_need(params, "number"))


def _k(params, cert=None):
    """``--k``, falling back to the dimension a constructed number was built for."""
    if "k" not in params and cert is not None:
        return cert.k
    return _int(_need(params, "k"))


def _cap(params, default):
    return _int(params["cap"]) if "cap" in params else default


def _cmd_construct(cfg):
    handle, cert = _number(cfg.params)
    out = {"number": handle, "certificate": cert, "provenance": "CITED" if cert else "TRIVIAL"}
    if cert is not None and cert.membership is not None:
        base, digits = cert.membership
        depth = _int(cfg.params.get("depth", "1000"))
        out["membership"] = construct.digit_membership(handle, base, digits, depth)
    return out, EXIT_OK


def _cmd_scan(cfg):
    p = cfg.params
    handle, cert = _number(p)
    t = cfg.target
    if t == "mx":
        ap = simul.scan_Mx(handle, _k(p, cert), _int(_need(p, "x")))
        return {"approximant": ap, "provenance": "DERIVED"}, EXIT_OK
    if t == "linear":
        hit = dual.scan_linear_form(handle, _k(p, cert), _int(_need(p, "height")), _cap(p, dual.DUAL_CAP),
                                    workers=cfg.workers)
        return {"hit": hit, "provenance": "DERIVED"}, EXIT_OK
    if t == "convergents":
        return {"convergents": contfrac.convergents(handle, _int(_need(p, "qmax"))), "provenance": "DERIVED"}, EXIT_OK
    if t == "candidates":
        c = simul.good_candidates(handle, _k(p, cert), _int(_need(p, "xmax")), as_rat(_need(p, "T")),
                                  workers=cfg.workers, cap=_cap(p, simul.SCAN_CAP))
        return {"candidates": c, "provenance": "DERIVED"}, EXIT_OK
    raise InvalidSpec(f"unknown scan target {t!r}")


def _cmd_estimate(cfg):
    p = cfg.params
    handle, cert = _number(p)
    k = _k(p, cert)
    t = cfg.target
    if t == "lambda":
        rep = exponents.estimate_lambda(handle, k, parse_scales(_need(p, "scales")), workers=cfg.workers)
    elif t == "lambda_hat":
        rep = exponents.estimate_lambda_hat(handle, k, parse_scales(_need(p, "scales")), workers=cfg.workers,
                                            cap=_cap(p, exponents.RECORD_CAP))
    elif t == "w":
        rep = dual.estimate_w(handle, k, parse_scales(_need(p, "heights")), _cap(p, dual.DUAL_CAP),
                              workers=cfg.workers)
    else:
        raise InvalidSpec(f"unknown estimate target {t!r}")
    if "tolerance" in p:
        rep.tolerance = float(p["tolerance"])
    return rep, EXIT_OK


def _cmd_verify(cfg):
    p = cfg.params
    handle, cert = _number(p)
    t = cfg.target
    if t == "lemma2":
        rep = simul.verify_lemma2(handle, _k(p, cert), _int(_need(p, "xmax")), workers=cfg.workers,
                                  cap=_cap(p, simul.SCAN_CAP))
        bad = bool(rep.violations)
    elif t == "lemma3":
        if handle.is_rational:
            raise InvalidSpec("lemma3 needs a lacunary number")
        exponent = as_rat(p["exponent"]) if "exponent" in p else None
        rep = simul.verify_lemma3(handle.spec, _k(p, cert), _int(_need(p, "xmax")), exponent=exponent,
                                  workers=cfg.workers, cap=_cap(p, simul.SCAN_CAP))
        bad = bool(rep.violations)
    elif t == "prop1":
        rep = contfrac.check_prop1(handle, _int(_need(p, "Q")))
        bad = not rep.consistent
    elif t == "liouville":
        rep = simul.liouville_witness(handle, _k(p, cert), _int(_need(p, "xmax")), workers=cfg.workers,
                                      exhaustive_cap=_cap(p, simul.SCAN_CAP))
        bad = rep.witness is None
    else:
        raise InvalidSpec(f"unknown verification {t!r}")
    code = EXIT_VIOLATION if bad and not cfg.evidence else EXIT_OK
    return {"report": rep, "finding": bad, "provenance": "DERIVED"}, code


def _cmd_formula(cfg):
    p = cfg.params
    t = cfg.target
    if t == "hausdorff":
        res = formulas.hausdorff_dim(_k(p), _need(p, "lambda"), p.get("regime", "auto"))
    elif t == "spectrum":
        res = formulas.spectrum_formula(_need(p, "lambda1"), _k(p))
    elif t == "bestens":
        res = formulas.bestens_bounds(_need(p, "lambda1"), _k(p) if "k" in p else None)
    elif t == "besten":
        res = formulas.besten_transfer(_need(p, "lambda_n"), _int(_need(p, "n")), _int(_need(p, "m")))
    elif t == "holds":
        res = formulas.holds_lower_bound(_need(p, "lambda_n"), _int(_need(p, "n")), _k(p))
    elif t == "theo":
        res = formulas.theo_bound(_need(p, "lambda1"), _k(p))
    elif t == "uniform":
        res = formulas.uniform_bounds(_k(p))
    elif t == "neuko":
        res = formulas.neuko_bound(_need(p, "w1"), _k(p))
    elif t == "transference":
        lam = p.get("lambda")
        res = formulas.transference_check(lam, _need(p, "w"), _k(p), p.get("uniform") == "yes")
        return {"verdict": res, "holds": res.holds, "provenance": "CITED"}, EXIT_OK
    else:
        raise InvalidSpec(f"unknown formula {t!r}")
    return {"result": res, "value": res.value, "provenance": "CITED"}, EXIT_OK


def _cmd_conjecture(cfg):
    p = cfg.params
    handle, _ = _number(p)
    ev = exponents.conjecture_evidence(handle, _int(_need(p, "m")), _int(_need(p, "n")),
                                       parse_scales(_need(p, "scales")), workers=cfg.workers)
    return {"evidence": ev, "provenance": "DERIVED"}, EXIT_OK


COMMANDS = {
    "construct": _cmd_construct,
    "scan": _cmd_scan,
    "estimate": _cmd_estimate,
    "verify": _cmd_verify,
    "formula": _cmd_formula,
    "conjecture": _cmd_conjecture,
}


def render(cfg: RunConfig, payload) -> str:
    if cfg.fmt == "csv":
        if not isinstance(payload, exponents.ExponentReport):
            raise InvalidSpec("csv output is only available for estimate reports")
        return samples_csv(payload)
    if cfg.fmt == "text" and isinstance(payload, dict) and "value" in payload:
        return dumps(payload["value"]).strip().strip('"') + "\n"
    body = {"command": cfg.command, "target": cfg.target, "params": dict(sorted(cfg.params.items())),
            "result": payload}
    return dumps(body)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a configuration; returns ``(exit code, rendered output)``."""
    try:
        cfg.validate()
        handler = COMMANDS.get(cfg.command)
        if handler is None:
            raise InvalidSpec(f"unknown command {cfg.command!r}")
        payload, code = handler(cfg)
        return code, render(cfg, payload)
    except PrecisionExhausted as exc:
        return EXIT_PRECISION, f"error: {exc}\n"
    except (InvalidSpec, NoApplicableResult) as exc:
        return EXIT_CONFIG, f"error: {exc}\n"
    except VeroneseError as exc:
        return EXIT_VIOLATION, f"error: {exc}\n"


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


_PARAM_FLAGS = [
    ("number", "number spec, e.g. meinsatz:b=2,k=2,rho=1 or rational:1/3"),
    ("k", "dimension k"),
    ("x", "single x to evaluate"),
    ("xmax", "scan bound"),
    ("height", "coefficient height bound X"),
    ("heights", "comma-separated heights, e.g. 16,256,2^16"),
    ("scales", "comma-separated scales, e.g. 2^16,2^64"),
    ("qmax", "largest convergent denominator"),
    ("T", "target exponent as a rational"),
    ("Q", "parameter Q"),
    ("m", "index m"),
    ("n", "index n"),
    ("exponent", "exponent for the lemma3 scan"),
    ("cap", "enumeration cap"),
    ("depth", "digit depth for membership checks"),
    ("tolerance", "tolerance override in (0, 1)"),
    ("lambda", "exponent lambda"),
    ("lambda1", "exponent lambda_1 (or inf)"),
    ("lambda_n", "exponent lambda_n (or inf)"),
    ("w", "dual exponent w"),
    ("w1", "dual exponent w_1 (or inf)"),
    ("regime", "dimension regime: auto, jarnik, large, spectrum, quadratic, lower"),
]

_TARGETS = {
    "construct": (None, "build a number and report its proven exponents and digit membership"),
    "scan": (["mx", "linear", "convergents", "candidates"],
             "mx: certified max_j ||zeta^j x||; linear: minimal linear form in a box; "
             "convergents: certified continued fraction; candidates: x with M_x <= x^-T"),
    "estimate": (["lambda", "lambda_hat", "w"],
                 "finite-scale exponent estimates (window maxima, record boundaries, linear forms)"),
    "verify": (["lemma2", "lemma3", "prop1", "liouville"],
               "lemma2: divisibility below C0/x; lemma3: witnesses are multiples of b^a_n; "
               "prop1: no two independent short solutions; liouville: witness for M_x < C0/x"),
    "formula": (["hausdorff", "spectrum", "bestens", "besten", "holds", "theo", "uniform", "neuko",
                 "transference"], "closed-form exponent relations in exact rationals"),
    "conjecture": (None, "evidence for lambda_m >= (n lambda_n + n - m)/m"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="veronese", description="Simultaneous approximation to powers of a real number.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    for name, (targets, help_text) in _TARGETS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        if targets:
            sp.add_argument("target", choices=targets)
        for flag, h in _PARAM_FLAGS:
            sp.add_argument("--" + flag.replace("_", "-"), dest="p_" + flag, help=h)
        sp.add_argument("--uniform", action="store_true", help="uniform variant of the transference check")
        sp.add_argument("--workers", type=int, default=None, help=f"worker threads (default ${WORKERS_ENV} or 1)")
        sp.add_argument("--format", choices=["json", "csv", "text"], default="json")
        sp.add_argument("--evidence", action="store_true", help="report findings without a nonzero exit")
        sp.add_argument("--output", help="write the report to this file")
        sp.add_argument("--save-config", help="also write the run configuration to this INI file")
    rp = sub.add_parser("run", help="execute a saved INI configuration")
    rp.add_argument("config")
    rp.add_argument("--output")
    return ap


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidSpec(f"{WORKERS_ENV} must be an integer") from None


def config_from_args(ns) -> RunConfig:
    params = {}
    for flag, _ in _PARAM_FLAGS:
        v = getattr(ns, "p_" + flag)
        if v is not None:
            params[flag] = v
    if ns.uniform:
        params["uniform"] = "yes"
    workers = ns.workers if ns.workers is not None else _default_workers()
    return RunConfig(ns.command, getattr(ns, "target", None), params, workers, ns.format, ns.evidence)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        build_parser().print_help()
        return EXIT_CONFIG
    try:
        if ns.command == "run":
            with open(ns.config, encoding="utf-8") as fh:
                cfg = RunConfig.from_ini(fh.read())
        else:
            cfg = config_from_args(ns)
            if ns.save_config:
                with open(ns.save_config, "w", encoding="utf-8") as fh:
                    fh.write(cfg.to_ini())
    except (InvalidSpec, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    code, text = run(cfg)
    stream = sys.stderr if text.startswith("error:") else sys.stdout
    if ns.output and stream is sys.stdout:
        with open(ns.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
