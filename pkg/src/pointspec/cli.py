"""Command-line interface: pointspec <command> [options].

Every command writes a CSV table and a manifest.json holding the resolved
configuration and package version into --out.  Exit codes: 0 success,
1 a tolerance check failed, 2 usage or configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotics as asy
from . import bounds as bnd
from . import traces as tr
from .eigensolve import BACKENDS, EigenSolveError, count_nonreal, eigenvalues, ladder_match, refine_ladder
from .operator import PointPotential, TwoPointForm, build_truncated, decay_constant

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# potential parsing --------------------------------------------------------

def _complex(text: str, what: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"{what}: cannot parse {text!r} as a number") from None


def _real(text: str, what: str) -> float:
    v = _complex(text, what)
    if v.imag != 0:
        raise UsageError(f"{what}: expected a real number, got {text!r}")
    return v.real


def parse_potential(text: str) -> PointPotential:
    """"t,s,b" for the two-point form or "deltas: c@x; c@x; ..." for point masses."""
    text = text.strip()
    if text.startswith("deltas:"):
        terms = []
        for i, part in enumerate(p for p in text[len("deltas:"):].split(";") if p.strip()):
            if "@" not in part:
                raise UsageError(f"potential term {i + 1}: expected c@x, got {part.strip()!r}")
            c, x = part.split("@", 1)
            terms.append((_complex(c, f"potential term {i + 1} coupling"),
                           _real(x, f"potential term {i + 1} location")))
        if not terms:
            raise UsageError("potential: no terms after 'deltas:'")
        return _make(PointPotential, tuple(terms))
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"potential: expected 't,s,b' or 'deltas: c@x;...', got {text!r}")
    t = _complex(parts[0], "potential t")
    s = _complex(parts[1], "potential s")
    b = _real(parts[2], "potential b")
    return _make(lambda: TwoPointForm(t, s, b).to_potential())


def _make(factory, *args) -> PointPotential:
    try:
        return factory(*args)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"potential: {exc}") from None


# config files -------------------------------------------------------------

CONFIG_KEYS = {
    "potential", "c_re", "c_im", "b", "t", "s", "n_lo", "n_hi", "trunc", "kmax", "tol",
    "gamma_lo", "gamma_hi", "gamma_steps", "backend", "refine", "form", "zeta_variant",
    "alpha", "bound_c", "suites",
}


class Config(dict):
    """Key to raw string value, remembering the file:line of each key."""

    def __init__(self):
        super().__init__()
        self.where: dict[str, str] = {}

    def origin(self, key: str) -> str:
        return self.where.get(key, "config")


def read_config(path: str) -> Config:
    """Flat key = value lines; '#' starts a comment."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"config {path}: {exc.strerror}") from None
    out = Config()
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config {path}:{no}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"config {path}:{no}: unknown field {key!r}")
        if key in out:
            raise UsageError(f"config {path}:{no}: field {key!r} given twice")
        out[key] = value
        out.where[key] = f"config {path}:{no}"
    return out


def potential_from_config(cfg: Config) -> PointPotential | None:
    """Term lists c_re, c_im, b of equal length, or the scalars t, s, b."""
    try:
        return _potential_from_config(cfg)
    except UsageError as exc:
        keys = [k for k in ("potential", "c_re", "c_im", "b", "t", "s") if k in cfg]
        raise UsageError(f"{cfg.origin(keys[0]) if keys else 'config'}: {exc}") from None


def _potential_from_config(cfg: Config) -> PointPotential | None:
    if "potential" in cfg:
        return parse_potential(cfg["potential"])
    if "c_re" in cfg:
        re_ = [_real(v, "field c_re") for v in cfg["c_re"].split(",")]
        im_ = ([_real(v, "field c_im") for v in cfg["c_im"].split(",")]
               if "c_im" in cfg else [0.0] * len(re_))
        if "b" not in cfg:
            raise UsageError("field 'b' is required with c_re")
        bs = [_real(v, "field b") for v in cfg["b"].split(",")]
        if not len(re_) == len(im_) == len(bs):
            raise UsageError(f"c_re, c_im and b lengths differ ({len(re_)}, {len(im_)}, {len(bs)})")
        return _make(PointPotential, tuple((complex(r, i), x) for r, i, x in zip(re_, im_, bs)))
    if "t" in cfg or "s" in cfg:
        if "b" not in cfg:
            raise UsageError("field 'b' is required with t, s")
        t = _complex(cfg.get("t", "0"), "field t")
        s = _complex(cfg.get("s", "0"), "field s")
        b = _real(cfg["b"], "field b")
        return _make(lambda: TwoPointForm(t, s, b).to_potential())
    return None


# output -------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_manifest(out: Path, command: str, config: dict, files: list[str], extra=None) -> None:
    doc = {"package": "pointspec", "version": __version__, "command": command,
           "config": config, "outputs": files}
    if extra:
        doc["results"] = extra
    (out / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json) + "\n")


def _json(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"not serializable: {type(v).__name__}")


# argument resolution -------------------------------------------------------

def _resolve(args, cfg: Config, command: str = "spectrum") -> dict:
    """Command-line values override config values, which override defaults."""

    def pick(name, conv, default):
        v = getattr(args, name, None)
        if v is not None:
            return v
        if name in cfg:
            try:
                return conv(cfg[name])
            except (ValueError, UsageError):
                raise UsageError(f"{cfg.origin(name)}: field {name!r} has invalid value "
                                 f"{cfg[name]!r}") from None
        return default

    def flag(text):
        if text.lower() in ("1", "true", "yes"):
            return True
        if text.lower() in ("0", "false", "no"):
            return False
        raise ValueError(text)

    r = {
        "n_lo": pick("n_lo", int, 30),
        "n_hi": pick("n_hi", int, 200),
        "trunc": pick("trunc", int, None),
        "kmax": pick("kmax", int, None),
        "tol": pick("tol", float, 1e-8),
        "backend": pick("backend", str, "qr"),
        "refine": pick("refine", flag, False),
        "gamma_lo": pick("gamma_lo", float, 0.0),
        "gamma_hi": pick("gamma_hi", float, 1.0),
        "gamma_steps": pick("gamma_steps", int, 11),
        "form": pick("form", str, "trace"),
        "zeta_variant": pick("zeta_variant", str, "b2"),
        "alpha": pick("alpha", float, 0.25),
        "bound_c": pick("bound_c", float, 1.0),
    }
    if r["backend"] not in BACKENDS:
        raise UsageError(f"backend must be one of {BACKENDS}, got {r['backend']!r}")
    if r["n_lo"] < 0 or r["n_hi"] < r["n_lo"]:
        raise UsageError(f"bad level range [{r['n_lo']}, {r['n_hi']}]")
    if r["trunc"] is None:
        r["trunc"] = 1024 if command == "scan-gamma" else max(4 * r["n_hi"], 512)
    if r["trunc"] < 1:
        raise UsageError("trunc must be positive")
    if command in ("spectrum", "asymptotics") and r["trunc"] < 2 * r["n_hi"]:
        raise UsageError(f"trunc={r['trunc']} must be at least 2 n_hi = {2 * r['n_hi']}")
    if r["kmax"] is not None and r["kmax"] < 4 * max(r["n_hi"], 1):
        raise UsageError(f"kmax={r['kmax']} must be at least 4 n_hi")
    if not r["tol"] > 0:
        raise UsageError("tol must be positive")
    if r["gamma_steps"] < 1:
        raise UsageError("gamma_steps must be at least 1")
    if r["form"] not in asy.FORMS:
        raise UsageError(f"form must be one of {asy.FORMS}")
    if r["zeta_variant"] not in asy.ZETA_VARIANTS:
        raise UsageError(f"zeta_variant must be one of {asy.ZETA_VARIANTS}")
    pot = parse_potential(args.potential) if args.potential else potential_from_config(cfg)
    if pot is None:
        pot = TwoPointForm(0.0, 0.5, 1.0).to_potential()
    r["potential"] = pot
    return r


def _config_record(r: dict) -> dict:
    rec = {k: v for k, v in r.items() if k != "potential"}
    rec["potential"] = [{"c_re": c.real, "c_im": c.imag, "b": b} for c, b in r["potential"].terms]
    return rec


# commands -----------------------------------------------------------------

def cmd_spectrum(r: dict, out: Path) -> tuple[int, list[str], dict]:
    spec = eigenvalues(build_truncated(r["potential"], r["trunc"]), backend=r["backend"])
    ladder = ladder_match(spec, r["n_lo"], r["n_hi"])
    if r["refine"]:
        ladder = refine_ladder(ladder, r["potential"])
    rows = []
    for n, e in ladder.entries.items():
        res = spec.residual(e.lam) if spec.hessenberg is not None else spec.residual_norm
        rows.append((n, e.lam.real, e.lam.imag, e.status, r["trunc"], res))
    write_csv(out / "spectrum.csv", ["n", "re_lambda", "im_lambda", "status", "N", "residual"], rows)
    nonreal = count_nonreal(spec, r["tol"]).count
    return EXIT_OK, ["spectrum.csv"], {"all_matched": ladder.all_matched, "nonreal": nonreal}


def cmd_traces(r: dict, out: Path) -> tuple[int, list[str], dict]:
    w = r["potential"]
    rows = []
    n_lo = max(r["n_lo"], 1)
    for n in range(n_lo, r["n_hi"] + 1):
        a = tr.t1(n, w)
        b = tr.t2(n, w, r["kmax"])
        c = tr.t3(n, w, r["kmax"])
        lam = (2 * n + 1) + a + b.value + c.value
        C0 = decay_constant(w)
        bound = tr.remainder_bound(n, 3, r["alpha"], C0) if C0 > 0 else 0.0
        rows.append((n, a.real, a.imag, b.value.real, b.value.imag, b.tail_bound,
                     c.value.real, c.value.imag, c.tail_bound, lam.real, lam.imag, bound))
    write_csv(out / "traces.csv",
              ["n", "t1_re", "t1_im", "t2_re", "t2_im", "t2_tail", "t3_re", "t3_im", "t3_tail",
               "lambda_re", "lambda_im", "remainder_bound"], rows)
    return EXIT_OK, ["traces.csv"], {}


def _model_for(w: PointPotential, r: dict) -> asy.AsymptoticModel:
    terms = w.terms
    kw = dict(form=r["form"], zeta_variant=r["zeta_variant"])
    if len(terms) == 1:
        c, b = terms[0]
        if b == 0:
            return asy.AsymptoticModel("single_center", t=c / 2, **kw)
        return asy.AsymptoticModel("single_offcenter", t=c, b=b, **kw)
    if len(terms) == 2 and terms[0][1] == -terms[1][1] and terms[0][1] != 0:
        (c1, b1), (c2, _) = terms
        cp, cm = (c1, c2) if b1 > 0 else (c2, c1)
        t, s, b = (cp + cm) / 2, (cp - cm) / 2, abs(b1)
        if t == 0:
            return asy.AsymptoticModel("odd_pair", s=s, b=b, **kw)
        if s == 0:
            return asy.AsymptoticModel("even_pair", t=t, b=b, **kw)
        return asy.AsymptoticModel("mixed_pair", t=t, s=s, b=b, **kw)
    raise UsageError("asymptotics: potential must be one point or a symmetric pair")


def cmd_asymptotics(r: dict, out: Path) -> tuple[int, list[str], dict]:
    model = _model_for(r["potential"], r)
    exact = None
    if r["refine"]:
        spec = eigenvalues(build_truncated(r["potential"], r["trunc"]), backend=r["backend"])
        exact = refine_ladder(ladder_match(spec, r["n_lo"], r["n_hi"]), r["potential"])
    rows = []
    worst = 0.0
    for n in range(max(r["n_lo"], 1), r["n_hi"] + 1):
        value, band = asy.lambda_asymptotic(model, n)
        value = complex(value)
        row = [n, value.real, value.imag, band]
        if exact is not None:
            lam = exact[n].lam
            resid = abs(lam - value)
            worst = max(worst, resid / band)
            row += [lam.real, lam.imag, resid]
        rows.append(row)
    header = ["n", "re_asymptotic", "im_asymptotic", "band"]
    if exact is not None:
        header += ["re_exact", "im_exact", "residual"]
    write_csv(out / "asymptotics.csv", header, rows)
    res = {"kind": model.kind, "form": model.form}
    if exact is not None:
        res["max_residual_over_band"] = worst
    return EXIT_OK, ["asymptotics.csv"], res


def cmd_bounds(r: dict, out: Path) -> tuple[int, list[str], dict]:
    w = r["potential"]
    alpha = r["alpha"]
    C0 = decay_constant(w)
    rows = []
    fail = False
    for n in range(max(r["n_lo"], 1), r["n_hi"] + 1):
        limit = bnd.BoundContext(alpha, C0, n).hs_bound
        for i, z in enumerate(bnd.square_corners(n)):
            h = bnd.hs_norm(w, n, z, k_max=r["kmax"], C0=C0)
            ok = h.value + h.tail_bound <= limit
            fail |= not ok
            rows.append((n, i, z.real, z.imag, h.value, h.tail_bound, limit, ok))
    write_csv(out / "bounds.csv",
              ["n", "corner", "re_z", "im_z", "hs_norm", "hs_tail", "hs_bound", "holds"], rows)
    res = {"C0": C0, "M_alpha": bnd.m_alpha(alpha),
           "n_star_corrected": bnd.n_star(C0, alpha) if C0 > 0 else 1,
           "n_star_exact": bnd.n_star(C0, alpha, form="exact") if C0 > 0 else 1}
    return (EXIT_FAIL if fail else EXIT_OK), ["bounds.csv"], res


def cmd_scan_gamma(r: dict, out: Path) -> tuple[int, list[str], dict]:
    w = r["potential"]
    if not w.is_real:
        raise UsageError("scan-gamma: give the real potential w; the scan uses i gamma w")
    gammas = np.linspace(r["gamma_lo"], r["gamma_hi"], r["gamma_steps"])
    rows = []
    over = False
    for g in gammas:
        spec = eigenvalues(build_truncated(w.scaled(1j * float(g)), r["trunc"]), backend=r["backend"])
        T = count_nonreal(spec, r["tol"]).count
        bound = bnd.nonreal_bound(float(g), "abstract", C=r["bound_c"])
        over |= T > bound
        rows.append((float(g), T, bound, float(np.max(np.abs(spec.eigenvalues.imag)))))
    write_csv(out / "scan_gamma.csv", ["gamma", "T_gamma", "bound_value", "max_im"], rows)
    return (EXIT_FAIL if over else EXIT_OK), ["scan_gamma.csv"], {"exceeds_bound": over}


def cmd_verify(args, out: Path) -> tuple[int, list[str], dict]:
    from .verify import SUITES, run_suites
    names = args.suites.split(",") if args.suites else list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suites {unknown}; available: {', '.join(SUITES)}")
    results = run_suites(names)
    rows = []
    for res in results:
        print(res.line())
        rows.append((res.name, res.passed, res.summary))
    write_csv(out / "verify.csv", ["check", "passed", "summary"], rows)
    ok = all(res.passed for res in results)
    return (EXIT_OK if ok else EXIT_FAIL), ["verify.csv"], {r.name: r.passed for r in results}


# entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pointspec",
                                description="Spectra of the harmonic oscillator with point potentials.")
    p.add_argument("--version", action="version", version=f"pointspec {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key = value file")
        sp.add_argument("--out", default=".", help="output directory (default: current)")
        sp.add_argument("--potential", help="'t,s,b' or 'deltas: c@x; c@x'")
        sp.add_argument("--n-lo", dest="n_lo", type=int)
        sp.add_argument("--n-hi", dest="n_hi", type=int)
        sp.add_argument("--trunc", type=int, help="truncation size N")
        sp.add_argument("--kmax", type=int, help="lattice-sum cutoff")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--backend", choices=BACKENDS)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--form", choices=asy.FORMS)
        sp.add_argument("--zeta-variant", dest="zeta_variant", choices=asy.ZETA_VARIANTS)
        sp.add_argument("--refine", action="store_const", const=True,
                        help="polish eigenvalues with the exact secular equation")
        return sp

    common(sub.add_parser("spectrum", help="matched eigenvalues of a truncation"))
    common(sub.add_parser("traces", help="trace corrections T1..T3 per level"))
    common(sub.add_parser("asymptotics", help="closed-form eigenvalue asymptotics"))
    common(sub.add_parser("bounds", help="Hilbert-Schmidt bound at the square corners"))
    sg = common(sub.add_parser("scan-gamma", help="non-real eigenvalue count of i gamma w"))
    sg.add_argument("--gamma-lo", dest="gamma_lo", type=float)
    sg.add_argument("--gamma-hi", dest="gamma_hi", type=float)
    sg.add_argument("--gamma-steps", dest="gamma_steps", type=int)
    sg.add_argument("--bound-c", dest="bound_c", type=float)
    v = sub.add_parser("verify", help="run the verification suites")
    v.add_argument("--out", default=".")
    v.add_argument("--suites", help="comma-separated subset")
    return p


COMMANDS = {
    "spectrum": cmd_spectrum,
    "traces": cmd_traces,
    "asymptotics": cmd_asymptotics,
    "bounds": cmd_bounds,
    "scan-gamma": cmd_scan_gamma,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "verify":
            code, files, res = cmd_verify(args, out)
            write_manifest(out, "verify", {"suites": args.suites or "all"}, files, res)
            return code
        cfg = read_config(args.config) if args.config else Config()
        r = _resolve(args, cfg, args.command)
        code, files, res = COMMANDS[args.command](r, out)
        write_manifest(out, args.command, _config_record(r), files, res)
        return code
    except UsageError as exc:
        print(f"pointspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EigenSolveError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"pointspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"pointspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
