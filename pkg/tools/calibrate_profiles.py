"""Solve the fixture-suite calibration and write the committed profile library.

Three steps, all deterministic:

1. A pattern-level integer program (scipy ``milp``) chooses, for each agentic
   cell, how many scenarios carry each full/partial/unfillable pattern over
   the five variable rows (inputs, policy, actor, output, post-condition).
   Action boundary is always full and reasoning always opaque. Row totals,
   per-cell completeness sums, cross-stack coverage and the multi-agent
   implicit-policy share are constraints.
2. A boundary recipe per scenario (tool-call count and decision layout) is
   chosen greedily so the analytic per-cell boundary F1 tracks its target.
3. Partial confidences are realized as ratios the mapper actually produces
   for that tool-call count, then hill-climbed onto each cell's weight target.

Run:  python tools/calibrate_profiles.py [--out PATH] [--check]
Needs scipy (dev extra); the package itself only reads the JSON.
"""

from __future__ import annotations

import argparse
import itertools
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

ROWS = ("inputs", "policy_basis", "actor_identity_principal_authority", "output_action",
        "post_condition_state")
SHORT = "IPAOS"
CELLS = {
    "SW": "single_agent/within_stack",
    "SX": "single_agent/cross_stack",
    "MW": "multi_agent/within_stack",
    "MX": "multi_agent/cross_stack",
    "HW": "hitl/within_stack",
    "HX": "hitl/cross_stack",
    "BL": "non_agentic_baseline/not_applicable",
}
SOLVED = ("SW", "SX", "MW", "MX", "HX")
PER_CELL = 20

# T3 cell means; a cell's summed seven-row weight is mean * 20 * 7 / 100
MEANS = {"SW": 85.0, "SX": 71.1, "MW": 67.5, "MX": 53.6, "HW": 94.3, "HX": 79.3, "BL": 100.0}
# T7 row counts over 140 scenarios (full, partial, unfillable) for the variable rows
ROW_TOTALS = {"I": (80, 59, 1), "P": (102, 0, 38), "A": (27, 73, 40),
              "O": (107, 0, 33), "S": (76, 58, 6)}
F1_TARGET = {"SW": 0.84, "SX": 0.76, "MW": 0.13, "MX": 0.46, "HW": 0.73, "HX": 0.74}
CALLS = {"SW": range(3, 7), "SX": range(3, 7), "MW": range(12, 17), "MX": range(4, 9),
         "HW": range(5, 6), "HX": range(3, 7), "BL": range(3, 7)}
MODE6_SHARE = (0.52, 0.54)

# HITL within-stack is fixed: every scenario identical (degenerate CI).
# Actor 0.9 = session principal + 4 of 5 steps covered (one shared with the
# approver); post-condition 0.7 = 2 of 5 steps observed, 3 inferred from results.
HW_PATTERN = "FFPFP"
HW_CALLS = 5


def target_sum(cell: str) -> float:
    return round(MEANS[cell] * PER_CELL * 7 / 100, 6)


def allowed(cell: str, pattern: tuple[str, ...]) -> bool:
    d = dict(zip(SHORT, pattern))
    if d["P"] == "P" or d["O"] == "P":
        return False  # policy and output are all-or-nothing in T7
    if d["S"] == "U" and d["O"] != "U":
        return False  # a result always lets the state be inferred
    if d["I"] == "U" and cell != "MW":
        return False
    if cell == "SW" and "U" in (d["I"], d["P"], d["A"]):
        return False  # single-agent within-stack losses are schema mismatches only
    if cell.endswith("X") and "U" not in pattern:
        return False  # every cross-stack scenario loses something at the boundary
    return True


def solve_patterns() -> tuple[dict[str, dict[str, int]], int]:
    """Pattern counts per solved cell plus the mode-6 count for MW."""
    var = [(c, p) for c in SOLVED for p in itertools.product("FPU", repeat=5) if allowed(c, p)]
    nvp = len(var)
    m6 = nvp
    wvar = {c: nvp + 1 + i for i, c in enumerate(SOLVED)}
    nv = nvp + 1 + len(SOLVED)
    rows, lo, hi = [], [], []

    def add(coeffs, low, high):
        a = np.zeros(nv)
        for i, v in coeffs:
            a[i] += v
        rows.append(a)
        lo.append(low)
        hi.append(high)

    def count(cell, r, tag):
        k = SHORT.index(r)
        return [(i, 1) for i, (c, p) in enumerate(var) if c == cell and p[k] == tag]

    for cell in SOLVED:
        add([(i, 1) for i, (c, _) in enumerate(var) if c == cell], PER_CELL, PER_CELL)

    # T7 totals minus the fixed HW and baseline cells
    fixed = {r: [0, 0, 0] for r in SHORT}
    for r, tag in zip(SHORT, HW_PATTERN):
        fixed[r]["FPU".index(tag)] += PER_CELL
    for r in SHORT:
        fixed[r][0] += PER_CELL  # baseline all full
    for r, totals in ROW_TOTALS.items():
        k = SHORT.index(r)
        for j, tag in enumerate("FPU"):
            need = totals[j] - fixed[r][j]
            add([(i, 1) for i, (_, p) in enumerate(var) if p[k] == tag], need, need)

    # MW: implicit policy (mode 6) is modal among unfillable rows
    p_u = count("MW", "P", "U")
    u_mw = [(i, p.count("U")) for i, (c, p) in enumerate(var) if c == "MW"]
    add([(m6, 1)] + [(i, -1) for i, _ in p_u], -np.inf, 0)
    add([(m6, 1)] + [(i, -MODE6_SHARE[0] * v) for i, v in u_mw], 0, np.inf)
    add([(m6, 1)] + [(i, -MODE6_SHARE[1] * v) for i, v in u_mw], -np.inf, 0)
    add([(m6, -2)] + p_u, -np.inf, -1)  # mode 6 beats mode 5
    add([(m6, -1)] + count("MW", "A", "U"), -np.inf, -1)  # beats mode 2
    add([(m6, -1)] + count("MW", "O", "U") + count("MW", "S", "U"), -np.inf, -1)  # beats mode 4

    # completeness: full rows + partial weight = target - 2 fixed rows per scenario
    for cell in SOLVED:
        goal = target_sum(cell) - 2 * PER_CELL
        add([(i, p.count("F")) for i, (c, p) in enumerate(var) if c == cell] + [(wvar[cell], 1)],
            goal, goal)
        partials = [(i, p.count("P")) for i, (c, p) in enumerate(var) if c == cell]
        add([(wvar[cell], 1)] + [(i, -0.38 * v) for i, v in partials], 0, np.inf)
        add([(wvar[cell], 1)] + [(i, -0.75 * v) for i, v in partials], -np.inf, 0)

    # soft preferences keep cells recognisable (HITL anchors actors, etc.)
    prefer = {("A", "U"): {"SW": 9, "SX": 2, "HX": 3}, ("P", "U"): {"SX": 1, "HX": 1},
              ("O", "U"): {"MW": 4, "MX": 1}, ("A", "F"): {"SX": 2, "MW": 9, "MX": 9, "HX": 3},
              ("S", "F"): {"MX": 1}, ("I", "P"): {"SW": 1, "HX": 1}}
    cost = np.zeros(nv)
    for i, (cell, p) in enumerate(var):
        d = dict(zip(SHORT, p))
        cost[i] = sum(prefer.get((r, d[r]), {}).get(cell, 0) for r in SHORT)
        cost[i] += 0.3 * p.count("U") ** 2
    integrality = np.ones(nv)
    for cell in SOLVED:
        integrality[wvar[cell]] = 0
    res = milp(cost, constraints=LinearConstraint(np.array(rows), lo, hi),
               integrality=integrality, bounds=Bounds(0, np.inf), options={"time_limit": 120})
    if res.status != 0:
        raise SystemExit(f"pattern program infeasible: {res.message}")
    out = {c: {} for c in SOLVED}
    for i, (cell, p) in enumerate(var):
        n = int(round(res.x[i]))
        if n:
            out[cell]["".join(p)] = n
    return out, int(round(res.x[m6]))


# ---------------------------------------------------------------------------
# Boundary recipes
# ---------------------------------------------------------------------------

def recipe_options(cell: str, calls: int) -> list[dict]:
    """Decision layouts for one scenario with their analytic F1.

    Hits start at (or one before) an invocation; a miss has two lead-in steps;
    extra invocations inside a decision and approvals outside a decision
    start are false positives.
    """
    n = calls
    opts = []
    if cell in ("SW", "SX", "BL"):
        for misses in range(0, min(2, n - 1) + 1):
            opts.append({"calls": n, "decisions": n, "misses": misses, "approvals": 0,
                         "f1": (2 * (n - misses)) / (2 * n)})
    elif cell == "MW":
        opts.append({"calls": n, "decisions": 1, "misses": 0, "approvals": 0, "f1": 2 / (n + 1)})
    elif cell == "MX":
        for m in range(1, 4):
            opts.append({"calls": n, "decisions": m, "misses": 0, "approvals": 0,
                         "f1": 2 * m / (n + m)})
    elif cell in ("HW", "HX"):
        for misses in range(0, 2):
            for k in range(1, n - misses + 1):  # ambiguity needs an approver on record
                tp = n - misses
                opts.append({"calls": n, "decisions": n, "misses": misses, "approvals": k,
                             "f1": 2 * tp / (2 * n + k)})
    return opts


def choose_recipes(cell: str) -> list[dict]:
    span = list(CALLS[cell])
    chosen: list[dict] = []
    if cell == "MW":
        # only the call count moves F1 here; pick it greedily
        total = 0.0
        for i in range(PER_CELL):
            best = min(
                (recipe_options(cell, n)[0] for n in span),
                key=lambda o: (abs((total + o["f1"]) / (i + 1) - F1_TARGET[cell]), o["calls"]),
            )
            chosen.append(best)
            total += best["f1"]
        return chosen
    target = F1_TARGET.get(cell)
    total = 0.0
    for i in range(PER_CELL):
        n = span[i % len(span)]
        opts = recipe_options(cell, n)
        if target is None:  # baseline: boundaries are not scored
            best = opts[0]
        else:
            best = min(opts, key=lambda o: (abs((total + o["f1"]) / (i + 1) - target),
                                            o["approvals"], o["misses"], o["decisions"]))
        chosen.append(best)
        total += best["f1"]
    return chosen


# ---------------------------------------------------------------------------
# Confidence realization
# ---------------------------------------------------------------------------

def partial_choices(cell: str, row: str, pattern: str, n: int) -> list[tuple[Fraction, dict]]:
    """Confidences the mapper can produce for one partial row with n invocations."""
    out = []
    if row == "I":
        for j in range(1, n):
            out.append((Fraction(j, n), {"inputs_kept": j}))
    elif row == "A":
        hitl = cell.startswith("H")
        for s in ((1,) if hitl else (0, 1)):
            top = n - 1  # HITL: one step is shared with the approver
            for j in range(0, top + 1):
                value = Fraction(s, 2) + Fraction(j, 2 * n)
                if 0 < value < 1:
                    out.append((value, {"session_principal": bool(s), "links_kept": j}))
    elif row == "S":
        output_full = pattern[SHORT.index("O")] == "F"
        if output_full:
            for c in range(0, n):
                out.append((Fraction(1, 2) + Fraction(c, 2 * n), {"states_kept": c}))
        else:
            for c in range(1, n):
                out.append((Fraction(c, n), {"states_kept": c}))
    return out


def realize(cell: str, patterns: list[str], recipes: list[dict], goal: Fraction) -> list[dict]:
    """Pick one choice per partial row so the cell's partial weight hits ``goal``."""
    slots = []  # (scenario index, row, choices)
    for i, (pattern, recipe) in enumerate(zip(patterns, recipes)):
        for k, tag in enumerate(pattern):
            if tag == "P":
                choices = partial_choices(cell, SHORT[k], pattern, recipe["calls"])
                if not choices:
                    raise SystemExit(f"{cell}: no realizable confidence for {SHORT[k]} in {pattern}")
                slots.append((i, SHORT[k], choices))
    # greedy: spread the remaining weight evenly, then hill-climb single slots
    pick = []
    remaining = goal
    for idx, (_, _, choices) in enumerate(slots):
        left = len(slots) - idx
        aim = remaining / left
        best = min(range(len(choices)), key=lambda c: (abs(choices[c][0] - aim), c))
        pick.append(best)
        remaining -= choices[best][0]

    def total():
        return sum(slots[s][2][pick[s]][0] for s in range(len(slots)))

    for _ in range(200):
        gap = goal - total()
        if gap == 0:
            break
        best_move = None
        for s, (_, _, choices) in enumerate(slots):
            current = choices[pick[s]][0]
            for c, (value, _) in enumerate(choices):
                new_gap = abs(gap - (value - current))
                if new_gap < abs(gap) and (best_move is None or new_gap < best_move[0]):
                    best_move = (new_gap, s, c)
        if best_move is not None:
            pick[best_move[1]] = best_move[2]
            continue
        # no single move helps: try changing two slots at once
        best_pair = None
        for s1, (_, _, ch1) in enumerate(slots):
            d1 = [(v - ch1[pick[s1]][0], c) for c, (v, _) in enumerate(ch1)]
            for s2 in range(s1 + 1, len(slots)):
                ch2 = slots[s2][2]
                for delta1, c1 in d1:
                    for c2, (v2, _) in enumerate(ch2):
                        new_gap = abs(gap - delta1 - (v2 - ch2[pick[s2]][0]))
                        if new_gap < abs(gap) and (best_pair is None or new_gap < best_pair[0]):
                            best_pair = (new_gap, s1, c1, s2, c2)
        if best_pair is None:
            break
        pick[best_pair[1]] = best_pair[2]
        pick[best_pair[3]] = best_pair[4]

    params: list[dict] = [dict() for _ in patterns]
    confidences: list[dict] = [dict() for _ in patterns]
    for s, (i, row, choices) in enumerate(slots):
        value, knobs = choices[pick[s]]
        params[i].update(knobs)
        confidences[i][row] = value
    return [{"params": p, "confidences": c} for p, c in zip(params, confidences)]


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def mode_tags(cell: str, pattern: str, mode6: bool) -> dict[str, int]:
    """Injected mode per non-full variable row."""
    tags = {}
    cross = cell.endswith("X")
    for r, tag in zip(SHORT, pattern):
        if tag == "F":
            continue
        if cross and not (r == "A" and tag == "P" and cell.startswith("H")):
            tags[r] = 3
        elif r == "I":
            tags[r] = 1
        elif r == "P":
            tags[r] = 6 if mode6 else 5
        elif r == "A":
            tags[r] = 7 if cell.startswith("H") else 2
        else:
            tags[r] = 4
    if cell.startswith("H"):
        tags.setdefault("A", 7)
    return tags


def build_library() -> dict:
    counts, mode6_total = solve_patterns()
    library = {"cells": {}, "meta": {
        "mode6_mw": mode6_total,
        "targets": {CELLS[c]: {"mean": MEANS[c], "weight_sum": target_sum(c),
                               "f1": F1_TARGET.get(c)} for c in CELLS},
    }}
    for cell in CELLS:
        if cell in SOLVED:
            # interleave patterns so neighbouring scenarios differ
            pool = sorted(counts[cell].items())
            patterns = []
            while len(patterns) < PER_CELL:
                for p, left in pool:
                    if patterns.count(p) < left:
                        patterns.append(p)
        elif cell == "HW":
            patterns = [HW_PATTERN] * PER_CELL
        else:
            patterns = ["FFFFF"] * PER_CELL
        recipes = choose_recipes(cell)
        full_rows = sum(p.count("F") for p in patterns)
        goal = Fraction(target_sum(cell)).limit_denominator(100) - 2 * PER_CELL - full_rows
        if cell == "HW":
            realized = [{"params": {"inputs_kept": HW_CALLS, "session_principal": True,
                                    "links_kept": HW_CALLS - 1, "states_kept": 2},
                         "confidences": {"A": Fraction(9, 10), "S": Fraction(7, 10)}}] * PER_CELL
        else:
            realized = realize(cell, patterns, recipes, goal)
        mode6_left = mode6_total if cell == "MW" else 0
        entries = []
        for pattern, recipe, real in zip(patterns, recipes, realized):
            mode6 = cell == "MW" and pattern[1] == "U" and mode6_left > 0
            if mode6:
                mode6_left -= 1
            entries.append({
                "pattern": dict(zip(ROWS, pattern)),
                "calls": recipe["calls"],
                "decisions": recipe["decisions"],
                "misses": recipe["misses"],
                "approvals": recipe["approvals"],
                "expected_f1": round(recipe["f1"], 6),
                "params": real["params"],
                "confidences": {ROWS[SHORT.index(r)]: float(v) for r, v in real["confidences"].items()},
                "modes": {ROWS[SHORT.index(r)]: m for r, m in mode_tags(cell, pattern, mode6).items()},
            })
        library["cells"][CELLS[cell]] = entries
    return library


def summarize(library: dict) -> list[str]:
    lines = []
    for key, entries in library["cells"].items():
        weight = 0.0
        for e in entries:
            for row, tag in e["pattern"].items():
                weight += 1.0 if tag == "F" else e["confidences"].get(row, 0.0) if tag == "P" else 0.0
            weight += 2
        mean = 100 * weight / (7 * len(entries))
        f1 = sum(e["expected_f1"] for e in entries) / len(entries)
        lines.append(f"{key:38s} mean {mean:7.3f}  f1 {f1:.3f}")
    return lines


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    default = Path(__file__).resolve().parents[1] / "src/tracerecon/synthgen/profiles.json"
    parser.add_argument("--out", type=Path, default=default)
    parser.add_argument("--check", action="store_true", help="compare against the committed file")
    args = parser.parse_args()
    library = build_library()
    text = json.dumps(library, sort_keys=True, indent=1) + "\n"
    for line in summarize(library):
        print(line)
    if args.check:
        same = args.out.read_text() == text
        print("committed library", "matches" if same else "DIFFERS")
        raise SystemExit(0 if same else 1)
    args.out.write_text(text)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
