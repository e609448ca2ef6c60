#----------------------------------------------------------------------------
# Created By  : fflab developers
# Date: 2024
# --------------------------------------------------------------------------
"""
Verification suites and the `fflab` command line.

    fflab count --field 5 --m 3 --a 1 --b 1
    fflab distribution --field 3^3
    fflab verify --suite all --json

Report lines go to stdout as CSV (header first) or JSON lines; logs and
progress bars go to stderr.
"""
import os
import sys
import csv
import json
import math
import logging
import argparse
import functools
import collections
from dataclasses import dataclass, asdict
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import sympy
import tqdm

from .errors import (FFLabError, ConfigError, UnsupportedCharacteristic, WrongCharacteristic,
                     PreconditionViolated, SizeOverflow)
from .ff_core import FieldSpec, build_field, build_tower
from .ffpoly import is_irreducible
from .charsum import (CycInt, MultCharIndex, kloosterman, kloosterman_integer, kloosterman_table,
                      kloosterman_is_rational, gauss_sum, verify_carlitz, verify_moisio,
                      verify_gaussreps)
from .counting import (CountInstance, n_t_bruteforce, n_t_routes, p_m_routes, p_m_bruteforce,
                       p_m_moebius, irreducible_census, expected_irreducible_total, bounds_report,
                       cubic_bounds, system_count)
from .curves import (PlaneCubic, CubicModel, WeierstrassModel, count_points, is_singular,
                     system_curve, p3_via_curve, singular_case_p3, to_char3_form, j_invariant,
                     is_supersingular, twist_relation, kloosterman_via_curve,
                     weierstrass_classes, deuring_census)
from .classnum import class_number_h, kronecker_H
from .utils import json_read, json_write, config_logger, env_threads, merge_config

__all__ = ["DistributionRow", "DistributionTable", "ReportLine", "value_distribution",
           "cubic_distribution_check", "quartic_distribution_check", "kl_mod3_check",
           "kl_mod3_criterion", "t3_check", "run_report", "load_fixtures", "DEFAULT_CONFIG",
           "SUITES", "main"]

logger = logging.getLogger(__name__)

FIXTURE_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data",
                            "worked_examples.json")

MAX_DISTRIBUTION_FIELD = 1 << 12
MOISIO_EVERY_ALPHA = 1 << 10

DEFAULT_CONFIG = {
    "grid_q": [2, 3, 4, 5, 7, 8, 9],
    "grid_m": [2, 3, 4],
    "spot_q": [11, 13, 16, 25, 27],
    "spot_m": [2, 3],
    "char3_q": [3, 9, 27, 81],
    "char2_q": [4, 8, 16, 64],
    "cubic_q": [3, 9, 27],
    "quartic_q": [4, 8, 16],
    "carlitz_q": [4, 8, 16, 32],
    "moisio_base_q": [2, 3, 4, 5, 7, 8, 9],
    "moisio_limit": 1 << 14,
    "gauss_base_q": [3, 4, 5, 7, 8, 9, 16],
    "gauss_limit": 1 << 12,
    "rational_q": [3, 4, 5, 9],
    "rational_n": [1, 2, 3],
    "klmod3_r_max": 10,
    "t3_q": [2, 4, 8, 16],
    "curve_q": [2, 3, 4, 5, 7, 8, 9],
    "kl_curve_q": [3, 9, 27],
    "char3_curve_q": [3, 9],
    "hasse_weil_q": [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27],
    "deuring_q": [5, 7, 11, 13],
    "extended": {
        "spot_q": [11, 13, 16, 25, 27, 32, 49],
        "spot_m": [2, 3, 4],
        "char3_q": [3, 9, 27, 81, 243, 729],
        "char2_q": [4, 8, 16, 32, 64, 128, 256, 512, 1024],
        "cubic_q": [3, 9, 27, 81],
        "moisio_base_q": [2, 3, 4, 5, 7, 8, 9, 11, 13, 16],
        "deuring_q": [5, 7, 11, 13, 17, 19, 23],
    },
}

# --- report lines ---------------------------------------------------------

@dataclass
class ReportLine:
    suite: str
    instance: str
    check: str
    expected: object
    observed: object
    passed: bool
    detail: str = ""

def _line(suite, instance, check, expected, observed, passed=None, detail=""):
    if passed is None:
        passed = expected == observed
    return ReportLine(suite, instance, check, expected, observed, bool(passed), detail)

def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ";".join(_cell(v) for v in value)
    return str(value)

def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if value is None:
        return None
    return str(value)

class Emitter(object):
    """Writes dict rows as CSV with a header, or as JSON lines."""

    def __init__(self, stream=None, json_lines=False):
        self.stream = stream or sys.stdout
        self.json_lines = json_lines
        self._writer = None

    def __call__(self, row):
        if isinstance(row, ReportLine):
            row = asdict(row)
        if self.json_lines:
            self.stream.write(json.dumps({k: _json_value(v) for k, v in row.items()}) + "\n")
            return
        if self._writer is None:
            self._writer = csv.writer(self.stream, lineterminator="\n")
            self._writer.writerow(list(row))
        self._writer.writerow([_cell(v) for v in row.values()])

# --- distributions ----------------------------------------------------------

@dataclass
class DistributionRow:
    t: int
    multiplicity: int
    H: int
    congruence_ok: bool

    @property
    def passed(self):
        return self.congruence_ok and self.multiplicity == self.H

@dataclass
class DistributionTable:
    q: int
    rows: list

    @property
    def total(self):
        return sum(r.multiplicity for r in self.rows)

    @property
    def holds(self):
        return self.total == self.q - 1 and all(r.passed for r in self.rows)

def _admissible_traces(q, modulus):
    """t with t^2 < 4q and t = -1 mod `modulus`."""
    s = math.isqrt(4 * q)
    return [t for t in range(-s, s + 1) if t * t < 4 * q and (t + 1) % modulus == 0]

def _pair_counts(ctx, m, p_of_c):
    """
    Number of pairs (a, b), ab != 0, per value of P_m(a, b).
    P_m(a, b) = P_m(1, b/a^m) under x -> ax, so each c = b/a^m stands for q-1 pairs.
    """
    counts = collections.Counter()
    for c in ctx.nonzero():
        counts[p_of_c(int(c))] += ctx.q - 1
    return counts

def value_distribution(ctx):
    """The multiset of k_1(c), c != 0, against H(t^2 - 4q)."""
    if ctx.p not in (2, 3):
        raise UnsupportedCharacteristic("value distribution needs p in {{2, 3}}, got {}".format(
                                        ctx.p))
    if ctx.p == 2 and ctx.r == 1:
        raise PreconditionViolated("the characteristic 2 distribution needs q >= 4")
    if ctx.q > MAX_DISTRIBUTION_FIELD:
        raise SizeOverflow("q={} exceeds {}".format(ctx.q, MAX_DISTRIBUTION_FIELD))
    q = ctx.q
    modulus = 3 if ctx.p == 3 else 4
    observed = collections.Counter(kloosterman_table(ctx, 1).values())
    rows = []
    for t in sorted(set(_admissible_traces(q, modulus)) | set(observed)):
        admissible = t * t < 4 * q and (t + 1) % modulus == 0
        H = kronecker_H(t * t - 4 * q) if admissible else 0
        rows.append(DistributionRow(t, observed.get(t, 0), H, admissible))
    return DistributionTable(q, rows)

def _cubic_distribution(ctx, route):
    if ctx.p != 3:
        raise WrongCharacteristic("cubic distribution needs p = 3, got {}".format(ctx.p))
    q = ctx.q
    if route == "curve":
        p_of_c = functools.partial(p3_via_curve, ctx, 1)
    elif route == "bruteforce":
        p_of_c = functools.partial(p_m_bruteforce, ctx, 3, 1)
    else:
        raise ConfigError("unknown route {!r}".format(route))
    counts = _pair_counts(ctx, 3, p_of_c)
    rows = []
    for t in _admissible_traces(q, 3):
        P = (q + 1 + t) // 3
        rows.append((t, P, (q - 1) * kronecker_H(t * t - 4 * q), counts.get(P, 0)))
    return rows

def cubic_distribution_check(ctx, route="curve"):
    """Pairs with P_3(a, b) = (q+1+t)/3 number (q-1) H(t^2 - 4q)."""
    return all(expected == observed for _, _, expected, observed in
               _cubic_distribution(ctx, route))

def _quartic_distribution(ctx, route):
    if ctx.p != 2 or ctx.r < 2:
        raise WrongCharacteristic("quartic distribution needs q = 2^r with r > 1")
    q = ctx.q
    if route == "moebius":
        p_of_c = functools.partial(p_m_moebius, ctx, 4, 1)
    elif route == "bruteforce":
        p_of_c = functools.partial(p_m_bruteforce, ctx, 4, 1)
    else:
        raise ConfigError("unknown route {!r}".format(route))
    counts = _pair_counts(ctx, 4, p_of_c)
    rows = []
    for t in range(1, math.isqrt(4 * q) + 1, 2):
        if t * t >= 4 * q:
            continue
        P = (q * q + 2 * q + 1 - t * t) // 4
        rows.append((t, P, (q - 1) * kronecker_H(t * t - 4 * q), counts.get(P, 0)))
    return rows

def quartic_distribution_check(ctx, route="moebius"):
    """Pairs with P_4(a, b) = (q^2+2q+1-t^2)/4 number (q-1) H(t^2 - 4q), t odd."""
    return all(expected == observed for _, _, expected, observed in
               _quartic_distribution(ctx, route))

# --- characteristic 2 identities -----------------------------------------

def kl_mod3_criterion(ctx, b):
    """
    r odd: Tr(b^(1/3)) = 0.
    r even: b = a^3 with Tr_4(a) != 0.
    """
    q, r = ctx.q, ctx.r
    if r % 2:
        root = ctx.pow(b, pow(3, -1, q - 1)) if q > 2 else b
        return ctx.trace(root) == 0
    lb = ctx.log(b)
    if lb % 3:
        return False
    return ctx.relative_trace(ctx.pow(ctx.gamma, lb // 3), 2) != 0

def _kl_mod3_mismatches(ctx):
    if ctx.p != 2:
        raise WrongCharacteristic("divisibility criterion needs p = 2, got {}".format(ctx.p))
    values = kloosterman_table(ctx, 1)
    return [b for b, k in values.items() if (k % 3 == 0) != kl_mod3_criterion(ctx, b)]

def kl_mod3_check(ctx):
    """3 | k(b) exactly when the criterion holds, for every b != 0."""
    return not _kl_mod3_mismatches(ctx)

def _t3_counts(ctx, b):
    if ctx.p != 2:
        raise WrongCharacteristic("T_3 needs p = 2, got {}".format(ctx.p))
    if b == 0:
        raise PreconditionViolated("b must be nonzero")
    q = ctx.q
    A = [a for a in range(q) if ctx.trace(a) == 0]
    direct = sum(1 for a in A for c in range(q) if is_irreducible(ctx, [1, a, c, b]))
    k = kloosterman_integer(ctx, 1, b)
    cube_roots = sum(1 for x in A if ctx.pow(x, 3) == b)
    formula = (Fraction(q * q + 1 + k * k, 2) - cube_roots) / 3
    return direct, formula

def t3_check(ctx, b):
    """Irreducible x^3 + ax^2 + cx + b with Tr(a) = 0 against ((q^2+1+k(b)^2)/2 - N(b))/3."""
    direct, formula = _t3_counts(ctx, b)
    return direct == formula

# --- fixtures -------------------------------------------------------------

def load_fixtures(path=FIXTURE_PATH):
    return json_read(path)

def _canonical_pair(ctx, m, a, b, displayed):
    """x^m + a x^(m-1) + ... + b as printed maps to trace -a and norm (-1)^m b."""
    if not displayed:
        return a, b
    return ctx.neg(a), (b if m % 2 == 0 else ctx.neg(b))

def _worked_example_lines(suite):
    fx = load_fixtures()
    lines = []
    for item in fx["p_counts"]:
        ctx = build_field(item["field"])
        m = item["m"]
        a, b = _canonical_pair(ctx, m, ctx.element(item["a"]), ctx.element(item["b"]),
                               item.get("displayed", False))
        lines.append(_line(suite, _pair_label(ctx.q, m, a, b), "P_{}".format(m), item["P"],
                           p_m_bruteforce(ctx, m, a, b)))
    for item in fx["irreducible_totals"]:
        ctx = build_field(item["field"])
        m = item["m"]
        total = int(irreducible_census(ctx, m).sum())
        lines.append(_line(suite, "q={},m={}".format(ctx.q, m), "irreducible_total",
                           item["total"], total,
                           total == item["total"] == expected_irreducible_total(ctx.q, m)))
    for item in fx["pair_distributions"]:
        ctx = build_field(item["field"])
        m = item["m"]
        table = irreducible_census(ctx, m)
        for P, pairs in item["counts"]:
            observed = int((table[1:, 1:] == P).sum())
            lines.append(_line(suite, "q={},m={},P={}".format(ctx.q, m, P), "pairs", pairs,
                               observed))
    for item in fx["n_counts"]:
        ctx = build_field(item["field"])
        a, b = ctx.element(item["a"]), ctx.element(item["b"])
        inst = CountInstance(ctx.spec, item["m"], item["t"], a, b)
        N = n_t_bruteforce(inst)
        lines.append(_line(suite, inst.label(), "N_{}".format(inst.t), item["N"], N))
        if "bound" in item:
            lower, upper = cubic_bounds(ctx.q)
            bound = upper if item["bound"] == "upper" else lower
            lines.append(_line(suite, inst.label(), "sharp_" + item["bound"], bound, N))
    for item in fx["curve_counts"]:
        ctx = build_field(item["field"])
        c = ctx.element(item["c"])
        lines.append(_line(suite, "q={},c={}".format(ctx.q, c), "points", item["points"],
                           count_points(CubicModel(ctx, c)).total))
    for item in fx["kronecker_H"]:
        lines.append(_line(suite, "d={}".format(item["d"]), "H", item["H"],
                           kronecker_H(item["d"])))
    for item in fx["distributions"]:
        ctx = build_field(item["field"])
        table = value_distribution(ctx)
        observed = [[r.t, r.multiplicity] for r in table.rows]
        lines.append(_line(suite, "q={}".format(ctx.q), "k1_distribution",
                           _cell([_cell(r) for r in item["rows"]]),
                           _cell([_cell(r) for r in observed]),
                           observed == item["rows"] and table.holds))
    return lines

def _worked_examples(config):
    return [functools.partial(_worked_example_lines, "paper-examples")]

# --- suites -----------------------------------------------------------------

def _pair_label(q, m, a, b):
    return "q={},m={},a={},b={}".format(q, m, a, b)

def _route_lines(suite, records, check):
    expected = records[0].value
    observed = ["{}={}".format(r.route, r.value) for r in records]
    passed = all(r.value == expected for r in records)
    inst = records[0].instance
    return _line(suite, _pair_label(inst.q, inst.m, inst.a, inst.b), check, expected,
                 _cell(observed), passed)

def _instance_routes(suite, spec, m, pairs):
    lines = []
    for a, b in pairs:
        top = CountInstance(spec, m, m, a, b)
        for t in sympy.divisors(m):
            lines.append(_route_lines(suite, n_t_routes(top.with_t(t)), "N_{}".format(t)))
        lines.append(_route_lines(suite, p_m_routes(top), "P_{}".format(m)))
    return lines

def _conservation_line(suite, spec, m):
    ctx = build_field(spec)
    total = int(irreducible_census(ctx, m).sum())
    expected = expected_irreducible_total(ctx.q, m)
    return [_line(suite, "q={},m={}".format(ctx.q, m), "conservation", expected, total)]

def _routes(config):
    suite = "routes"
    tasks = []
    for q in config["grid_q"]:
        spec = FieldSpec.parse(q)
        pairs = [(a, b) for a in range(spec.q) for b in range(1, spec.q)]
        for m in config["grid_m"]:
            tasks.append(functools.partial(_instance_routes, suite, spec, m, pairs))
            tasks.append(functools.partial(_conservation_line, suite, spec, m))
    for q in config["spot_q"]:
        ctx = build_field(q)
        g = ctx.gamma
        pairs = [(a, b) for a in (0, 1, g) for b in (1, g, ctx.mul(g, g))]
        for m in config["spot_m"]:
            tasks.append(functools.partial(_instance_routes, suite, ctx.spec, m, pairs))
    return tasks

def _bounds_for(suite, spec, m):
    lines = []
    for a in range(spec.q):
        for b in range(1, spec.q):
            report = bounds_report(CountInstance(spec, m, m, a, b))
            failed = [c.name for c in report if not c.holds]
            detail = "failed:" + ";".join(failed) if failed else "min_slack={:.6g}".format(
                min(c.slack for c in report))
            lines.append(_line(suite, _pair_label(spec.q, m, a, b), "bounds",
                               len(report.checks), len(report.checks) - len(failed),
                               detail=detail))
    return lines

def _bounds(config):
    return [functools.partial(_bounds_for, "bounds", FieldSpec.parse(q), m)
            for q in config["grid_q"] for m in config["grid_m"]]

def _distribution_lines(suite, q):
    table = value_distribution(build_field(q))
    lines = [_line(suite, "q={},t={}".format(table.q, r.t), "multiplicity", r.H, r.multiplicity,
                   r.passed, "" if r.congruence_ok else "inadmissible")
             for r in table.rows]
    lines.append(_line(suite, "q={}".format(table.q), "total", table.q - 1, table.total))
    return lines

def _pair_distribution_lines(suite, q, m):
    ctx = build_field(q)
    rows = _cubic_distribution(ctx, "curve") if m == 3 else _quartic_distribution(ctx, "moebius")
    return [_line(suite, "q={},m={},t={}".format(ctx.q, m, t), "pairs_with_P={}".format(P),
                  expected, observed) for t, P, expected, observed in rows]

def _distributions(config):
    suite = "distributions"
    tasks = [functools.partial(_distribution_lines, suite, q)
             for q in config["char3_q"] + config["char2_q"]]
    tasks += [functools.partial(_pair_distribution_lines, suite, q, 3) for q in config["cubic_q"]]
    tasks += [functools.partial(_pair_distribution_lines, suite, q, 4)
              for q in config["quartic_q"]]
    return tasks

def _carlitz_lines(suite, q):
    ctx = build_field(q)
    ok = sum(verify_carlitz(ctx, int(c)) for c in ctx.nonzero())
    return [_line(suite, "q={}".format(q), "carlitz", ctx.q - 1, ok)]

def _moisio_lines(suite, q, m):
    tw = build_tower(q, m)
    if tw.top.q <= MOISIO_EVERY_ALPHA:
        alphas, detail = [int(a) for a in tw.top.nonzero()], "every alpha"
    else:
        # both sides only depend on the coset of alpha modulo (q-1)-th powers
        alphas = [int(tw.top.exp_table[k]) for k in range(tw.base_q - 1)]
        detail = "coset representatives"
    ok = sum(verify_moisio(tw, alpha) for alpha in alphas)
    return [_line(suite, "q={},m={}".format(tw.base_q, m), "moisio", len(alphas), ok,
                  detail=detail)]

def _gaussreps_lines(suite, q, t):
    tw = build_tower(q, t)
    lines = []
    for n in sympy.divisors(tw.base_q - 1):
        reps = [int(tw.top.exp_table[k]) for k in range(n)]
        ok = sum(verify_gaussreps(tw, n, alpha) for alpha in reps)
        lines.append(_line(suite, "q={},t={},n={}".format(tw.base_q, t, n), "gaussreps",
                           len(reps), ok))
    return lines

def _gauss_norm_lines(suite, q):
    ctx = build_field(q)
    ok = 0
    for j in range(1, ctx.order):
        G = gauss_sum(ctx, MultCharIndex(j, ctx.order))
        ok += G * G.conjugate() == CycInt.integer(G.order, ctx.q)
    return [_line(suite, "q={}".format(q), "gauss_norm", ctx.order - 1, ok)]

def _rationality_lines(suite, q, n):
    ctx = build_field(q)
    if ctx.order ** n > 1 << 16:
        return []
    rational = [kloosterman(ctx, n, int(c)).is_rational_integer() for c in ctx.nonzero()]
    predicted = kloosterman_is_rational(ctx.p, n)
    # the criterion is sufficient only; unpredicted pairs are reported, not judged
    passed = all(rational) if predicted else True
    return [_line(suite, "q={},n={}".format(q, n), "kloosterman_rational", predicted,
                  all(rational), passed,
                  "rational {}/{}".format(sum(rational), len(rational)))]

def _towers(bases, limit):
    for q in bases:
        m = 2
        while q ** m <= limit:
            yield q, m
            m += 1

def _identities(config):
    suite = "identities"
    tasks = [functools.partial(_carlitz_lines, suite, q) for q in config["carlitz_q"]]
    tasks += [functools.partial(_moisio_lines, suite, q, m)
              for q, m in _towers(config["moisio_base_q"], config["moisio_limit"])]
    tasks += [functools.partial(_gaussreps_lines, suite, q, t)
              for q in config["gauss_base_q"] for t in range(1, 4)
              if q ** t <= config["gauss_limit"]]
    tasks += [functools.partial(_gauss_norm_lines, suite, q) for q in config["gauss_base_q"]]
    tasks += [functools.partial(_rationality_lines, suite, q, n)
              for q in config["rational_q"] for n in config["rational_n"]]
    return tasks

def _kl_mod3_lines(suite, r):
    ctx = build_field(FieldSpec(2, r))
    bad = _kl_mod3_mismatches(ctx)
    return [_line(suite, "q={}".format(ctx.q), "kl_mod3", ctx.q - 1, ctx.q - 1 - len(bad),
                  detail="mismatch:" + _cell(bad[:8]) if bad else "")]

def _kl_mod3(config):
    return [functools.partial(_kl_mod3_lines, "kl-mod3", r)
            for r in range(1, config["klmod3_r_max"] + 1)]

def _t3_lines(suite, q):
    ctx = build_field(q)
    lines = []
    for b in ctx.nonzero():
        direct, formula = _t3_counts(ctx, int(b))
        lines.append(_line(suite, "q={},b={}".format(ctx.q, int(b)), "T3", formula, direct))
    return lines

def _t3(config):
    return [functools.partial(_t3_lines, "t3", q) for q in config["t3_q"]]

def _curve_count_lines(suite, q):
    """N_3(a, b) = |X(F_q)| = N(c) + 3 and P_3 through the curve, for all ab != 0."""
    ctx = build_field(q)
    nonzero = [int(c) for c in ctx.nonzero()]
    points = {c: count_points(CubicModel(ctx, c)).total for c in nonzero}
    system = {c: count_points(system_curve(ctx, c)).total for c in nonzero}
    n3 = p3 = sys_ok = 0
    for a in nonzero:
        for b in nonzero:
            c = ctx.div(b, ctx.pow(a, 3))
            N = n_t_bruteforce(CountInstance(ctx.spec, 3, 3, a, b))
            n3 += N == points[c]
            sys_ok += N == system[c] == system_count(ctx, 3, c) + 3
            p3 += p3_via_curve(ctx, a, b) == p_m_bruteforce(ctx, 3, a, b)
    pairs = len(nonzero) ** 2
    inst = "q={}".format(ctx.q)
    lines = [_line(suite, inst, "N3_equals_curve", pairs, n3),
             _line(suite, inst, "N3_equals_system_curve", pairs, sys_ok),
             _line(suite, inst, "P3_via_curve", pairs, p3)]
    if ctx.p != 3:
        ok = 0
        for a in nonzero:
            b = ctx.pow(ctx.div(a, ctx.scalar(3)), 3)
            ok += singular_case_p3(ctx, a) == p_m_bruteforce(ctx, 3, a, b)
        lines.append(_line(suite, inst, "singular_case", len(nonzero), ok))
    if ctx.p == 2:
        expected = (ctx.q - (-1) ** ctx.trace(1)) // 3
        observed = {p_m_bruteforce(ctx, 3, a, ctx.pow(a, 3)) for a in nonzero}
        lines.append(_line(suite, inst, "singular_case_chi1", expected,
                           _cell(sorted(observed)), observed == {expected}))
    return lines

def _kl_curve_lines(suite, q):
    ctx = build_field(q)
    ok = cong = 0
    for c in ctx.nonzero():
        k = kloosterman_via_curve(ctx, int(c))
        ok += k == kloosterman_integer(ctx, 1, int(c))
        cong += k % 3 == 2
        same = count_points(to_char3_form(CubicModel(ctx, int(c)))).total
        ok += same == k + ctx.q + 1
    inst = "q={}".format(ctx.q)
    return [_line(suite, inst, "kloosterman_via_curve", 2 * (ctx.q - 1), ok),
            _line(suite, inst, "k_mod3", ctx.q - 1, cong)]

def _char3_models(ctx):
    """All nonsingular reduced models y^2 = x^3 + a x^2 + b and y^2 = x^3 + c x + b."""
    nonzero = [int(c) for c in ctx.nonzero()]
    for a in nonzero:
        for b in nonzero:
            yield WeierstrassModel(ctx, a2=a, a6=b)
    for c in nonzero:
        for b in range(ctx.q):
            yield WeierstrassModel(ctx, a4=c, a6=b)

def _char3_lines(suite, q):
    ctx = build_field(q)
    models = list(_char3_models(ctx))
    ss = sum(is_supersingular(m) == (count_points(m).trace_t % 3 == 0) for m in models)
    twist = 0
    nonzero = [int(c) for c in ctx.nonzero()]
    for a in nonzero:
        for b in nonzero:
            nE, nX = twist_relation(ctx, a, b)
            t = nE - ctx.q - 1
            if ctx.is_square(a):
                twist += nE == nX and t % 3 == 2
            else:
                twist += nE + nX == 2 * (ctx.q + 1) and t % 3 == 1
    inst = "q={}".format(ctx.q)
    return [_line(suite, inst, "supersingular_iff_3_divides_t", len(models), ss),
            _line(suite, inst, "twist_relation", len(nonzero) ** 2, twist)]

def _hasse_weil_lines(suite, q):
    ctx = build_field(q)
    models = [CubicModel(ctx, int(c)) for c in ctx.nonzero()]
    if ctx.p == 3:
        models += list(_char3_models(ctx))
    elif ctx.p >= 5:
        models += [WeierstrassModel(ctx, a4=c.rep[0], a6=c.rep[1])
                   for c in weierstrass_classes(ctx)]
    checked = ok = 0
    for model in models:
        if is_singular(model):
            continue
        checked += 1
        ok += count_points(model).hasse_weil_holds(ctx.q)
    return [_line(suite, "q={}".format(ctx.q), "hasse_weil", checked, ok)]

def _curves(config):
    suite = "curves"
    tasks = [functools.partial(_curve_count_lines, suite, q) for q in config["curve_q"]]
    tasks += [functools.partial(_kl_curve_lines, suite, q) for q in config["kl_curve_q"]]
    tasks += [functools.partial(_char3_lines, suite, q) for q in config["char3_curve_q"]]
    tasks += [functools.partial(_hasse_weil_lines, suite, q) for q in config["hasse_weil_q"]]
    return tasks

def _deuring_lines(suite, q):
    ctx = build_field(q)
    lines = []
    for t in _admissible_traces(q, 1):
        if math.gcd(q, t) != 1:
            continue
        lines.append(_line(suite, "q={},t={}".format(q, t), "deuring",
                           kronecker_H(t * t - 4 * q), deuring_census(ctx, t)))
    four, k27 = ctx.scalar(4), ctx.scalar(27)
    nonsingular = sum(1 for A in range(q) for B in range(q)
                      if ctx.add(ctx.mul(four, ctx.pow(A, 3)), ctx.mul(k27, ctx.mul(B, B))))
    covered = sum(c.size for c in weierstrass_classes(ctx))
    lines.append(_line(suite, "q={}".format(q), "partition", nonsingular, covered))
    return lines

def _deuring(config):
    return [functools.partial(_deuring_lines, "deuring", q) for q in config["deuring_q"]]

SUITES = collections.OrderedDict([
    ("paper-examples", _worked_examples),
    ("routes", _routes),
    ("bounds", _bounds),
    ("distributions", _distributions),
    ("identities", _identities),
    ("kl-mod3", _kl_mod3),
    ("t3", _t3),
    ("curves", _curves),
    ("deuring", _deuring),
])

def run_report(config, suite="all", progress=False, threads=None):
    """
    Run one suite (or all of them) and yield its ReportLines in a fixed order.

    Parameters
    ----------
    config : dict
        a full configuration, see DEFAULT_CONFIG
    suite : str
    progress : bool
        tqdm bar on stderr
    threads : int or None
        worker count, FFLAB_THREADS when None
    """
    if suite != "all" and suite not in SUITES:
        raise ConfigError("unknown suite {!r}; choose from: all, {}".format(
                          suite, ", ".join(SUITES)))
    names = list(SUITES) if suite == "all" else [suite]
    threads = threads or env_threads()
    for name in names:
        tasks = SUITES[name](config)
        logger.info("suite %s: %d tasks", name, len(tasks))
        passed = total = 0
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = pool.map(lambda task: task(), tasks)
            for lines in tqdm.tqdm(results, total=len(tasks), desc=name, leave=False,
                                   disable=not progress):
                for line in lines:
                    total += 1
                    passed += line.passed
                    if not line.passed:
                        logger.error("%s %s %s: expected %s, observed %s", line.suite,
                                     line.instance, line.check, line.expected, line.observed)
                    yield line
        logger.info("suite %s: %d/%d lines passed", name, passed, total)

def build_config(config_file=None, extended=False):
    config = merge_config(DEFAULT_CONFIG, json_read(config_file) if config_file else None)
    if extended:
        config = merge_config(config, config["extended"])
    return config

# --- command line -----------------------------------------------------------

def _cmd_field(args, emit):
    ctx = build_field(args.field)
    if not args.elements:
        emit(collections.OrderedDict([("q", ctx.q), ("p", ctx.p), ("r", ctx.r),
                                      ("modulus", list(ctx.modulus)), ("gamma", ctx.gamma)]))
        return 0
    for x in ctx.elements():
        x = int(x)
        emit(collections.OrderedDict([("element", x), ("digits", ctx.digits(x).tolist()),
                                      ("log", ctx.log(x) if x else ""),
                                      ("trace", ctx.trace(x)), ("eta", ctx.eta(x))]))
    return 0

def _cmd_count(args, emit):
    ctx = build_field(args.field)
    a, b = ctx.element(args.a), ctx.element(args.b)
    top = CountInstance(ctx.spec, args.m, args.m, a, b)
    ts = [args.t] if args.t else sympy.divisors(args.m)
    lines = [_route_lines("count", n_t_routes(top.with_t(t)), "N_{}".format(t)) for t in ts]
    lines.append(_route_lines("count", p_m_routes(top), "P_{}".format(args.m)))
    if args.bounds:
        for check in bounds_report(top):
            lines.append(_line("count", top.label(), check.name, float(check.rhs), check.lhs,
                               check.holds, "slack={:.6g}".format(check.slack)))
    for line in lines:
        emit(line)
    return 0 if all(line.passed for line in lines) else 1

def _cmd_kloosterman(args, emit):
    ctx = build_field(args.field)
    cs = [ctx.element(args.c)] if args.c is not None else [int(c) for c in ctx.nonzero()]
    for c in cs:
        k = kloosterman(ctx, args.n, c)
        rational = k.is_rational_integer()
        emit(collections.OrderedDict([("q", ctx.q), ("n", args.n), ("c", c),
                                      ("value", k.to_integer() if rational else repr(k)),
                                      ("rational", rational)]))
    return 0

def _cmd_curve(args, emit):
    ctx = build_field(args.field)
    if args.weierstrass:
        coeffs = [ctx.element(s) for s in args.weierstrass.split(",")]
        if len(coeffs) != 5:
            raise ConfigError("--weierstrass takes a1,a2,a3,a4,a6")
        model = WeierstrassModel(ctx, *coeffs)
        name = "weierstrass"
    elif args.system is not None:
        model, name = system_curve(ctx, ctx.element(args.system)), "system"
    else:
        model, name = CubicModel(ctx, ctx.element(args.c)), "X_c"
    count = count_points(model)
    singular = is_singular(model)
    row = collections.OrderedDict([("q", ctx.q), ("model", name), ("points", count.total),
                                   ("trace_t", count.trace_t), ("singular", singular)])
    if ctx.p == 3 and not singular and not isinstance(model, PlaneCubic):
        wm = model.weierstrass() if isinstance(model, CubicModel) else model
        row["j"] = j_invariant(wm)
        row["supersingular"] = is_supersingular(wm)
    emit(row)
    return 0

def _cmd_classnum(args, emit):
    for d in args.d:
        emit(collections.OrderedDict([("d", d), ("h", class_number_h(d)),
                                      ("H", kronecker_H(d))]))
    return 0

def _cmd_distribution(args, emit):
    table = value_distribution(build_field(args.field))
    for r in table.rows:
        emit(collections.OrderedDict([("q", table.q), ("t", r.t),
                                      ("multiplicity", r.multiplicity), ("H", r.H),
                                      ("congruence_ok", r.congruence_ok)]))
    return 0 if table.holds else 1

def _cmd_verify(args, emit):
    config = build_config(args.config, args.extended)
    ok = True
    summary = collections.OrderedDict()
    for line in run_report(config, args.suite, progress=args.progress):
        emit(line)
        ok &= line.passed
        tally = summary.setdefault(line.suite, {"passed": 0, "total": 0})
        tally["passed"] += int(line.passed)
        tally["total"] += 1
    if args.summary:
        json_write(args.summary, summary)
        logger.info("summary written to %s", args.summary)
    return 0 if ok else 1

def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON lines instead of CSV")
    common.add_argument("--log-file", type=str, default=None)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true")
    verbosity.add_argument("--quiet", "-q", action="store_true")
    common.add_argument("--no-progress", dest="progress", action="store_false")

    parser = argparse.ArgumentParser(prog="fflab", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    p = sub.add_parser("field", parents=[common], help="field parameters and tables")
    p.add_argument("--field", "-f", type=str, required=True, help="p^r[:c_r,...,c_0] or q")
    p.add_argument("--elements", action="store_true", help="one row per element")
    p.set_defaults(func=_cmd_field)

    p = sub.add_parser("count", parents=[common], help="N_t and P_m through every route")
    p.add_argument("--field", "-f", type=str, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--a", type=str, required=True, help="element: decimal, g^k or -x")
    p.add_argument("--b", type=str, required=True)
    p.add_argument("--t", type=int, default=None, help="one divisor of m (default: all)")
    p.add_argument("--bounds", action="store_true", help="append every applicable bound")
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("kloosterman", parents=[common], help="k_n(c) values")
    p.add_argument("--field", "-f", type=str, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--c", type=str, default=None, help="one element (default: all c != 0)")
    p.set_defaults(func=_cmd_kloosterman)

    p = sub.add_parser("curve", parents=[common], help="projective point count of a cubic")
    p.add_argument("--field", "-f", type=str, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--c", type=str, help="X_c: y^2 + cy + xy = x^3")
    group.add_argument("--weierstrass", type=str, help="a1,a2,a3,a4,a6")
    group.add_argument("--system", type=str, help="c0 of x^2 y + x y^2 - x y + c0 = 0")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("classnum", parents=[common], help="h(d) and H(d)")
    p.add_argument("--d", type=int, nargs="+", required=True)
    p.set_defaults(func=_cmd_classnum)

    p = sub.add_parser("distribution", parents=[common], help="value distribution of k_1")
    p.add_argument("--field", "-f", type=str, required=True)
    p.set_defaults(func=_cmd_distribution)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", type=str, default="all",
                   help="all, " + ", ".join(SUITES))
    p.add_argument("--config", type=str, default=None, help="JSON file merged over defaults")
    p.add_argument("--extended", action="store_true", help="apply the larger sweep sizes")
    p.add_argument("--summary", type=str, default=None,
                   help="JSON file with pass counts per suite")
    p.set_defaults(func=_cmd_verify)
    return parser

def main(argv=None, stream=None):
    parser = make_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    config_logger(args.log_file, level)
    args.progress = args.progress and sys.stderr.isatty()

    emit = Emitter(stream, json_lines=args.json)
    try:
        return args.func(args, emit)
    except ConfigError as err:
        logger.error("%s", err)
        parser.print_usage(sys.stderr)
        return 2
    except FFLabError as err:
        logger.error("%s", err)
        return 2

if __name__ == "__main__":
    sys.exit(main())
