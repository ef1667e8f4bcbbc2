#!/usr/bin/env python3
"""Brute-force reference numbers for the two-thread CLH model.

Written directly against the lock's pseudo-code, sharing nothing with the C++
library. Prints JSON; compare against tests/golden/oracle.json with --check.
"""
import argparse
import itertools
import json
import sys
from collections import deque

N = 2
NODES = [0, 1, 2]
BOT = -1
G, P = "G", "P"

# state: (q, tail, aux, status, cur, res, nxt, prev, r)
Q, TAIL, AUX, STATUS, CUR, RES, NXT, PREV, R = range(9)


def upd(s, k, v):
    s = list(s)
    s[k] = v
    return tuple(s)


def upd_at(s, k, i, v):
    t = list(s[k])
    t[i] = v
    return upd(s, k, tuple(t))


def inv(s):
    q = s[Q]
    if len(set(q)) != len(q):
        return False
    res = s[RES]
    if res[0] == res[1] or s[AUX] in res or s[STATUS][s[AUX]] != G:
        return False
    if any(s[STATUS][res[t]] != P for t in q):
        return False
    return [s[AUX]] + [res[t] for t in q] == [s[PREV][t] for t in q] + [s[TAIL]]


def queued_pending(s):
    return all(s[STATUS][s[RES][t]] == P for t in s[Q])


def invariant_count():
    seqs = [()] + [(a,) for a in range(N)] + [(a, b) for a in range(N) for b in range(N)]
    core = 0
    for tail, aux, q, res, st, prev in itertools.product(
        NODES, NODES, seqs, itertools.product(NODES, repeat=N), itertools.product((G, P), repeat=3),
        itertools.product(NODES + [BOT], repeat=N)
    ):
        s = (q, tail, aux, st, (0, 0), res, (BOT, BOT), prev, (BOT, BOT))
        if inv(s):
            core += 1
    # cur ranges over nodes, next over nodes and bottom, independently
    return core * len(NODES) ** N * (len(NODES) + 1) ** N


# Instructions: (label, guard, effect). Guard None means always enabled.

def thread_round(i, variant):
    reset = ("reset", None, lambda s: upd_at(s, PREV, i, BOT))

    def swap_from(src):
        def eff(s):
            s = upd_at(s, PREV, i, s[TAIL])
            s = upd(s, TAIL, s[src][i])
            return upd(s, Q, s[Q] + (i,))
        return eff

    def grant(s):
        s = upd_at(s, STATUS, s[CUR][i], G)
        aux, res = s[AUX], s[RES][i]
        s = upd(s, AUX, res)
        s = upd_at(s, RES, i, aux)
        return upd(s, Q, s[Q][1:])

    nxt = ("next", None, lambda s: upd_at(s, NXT, i, s[PREV][i]))
    wait = ("await", lambda s: s[STATUS][s[PREV][i]] == G, lambda s: s)
    crit = ("crit", None, lambda s: s)
    restore = ("restore", None, lambda s: upd_at(s, CUR, i, s[NXT][i]))
    if variant == "annotated":
        pending = ("pending", None, lambda s: upd_at(s, STATUS, s[CUR][i], P))
        return [[reset], [pending], [("swap", None, swap_from(CUR))], [nxt], [wait], [crit], [("grant", None, grant)],
                [restore]]
    a = ("a", None, lambda s: upd_at(s, R, i, s[CUR][i]))
    b = ("b", None, lambda s: upd_at(s, STATUS, s[R][i], P))
    c = ("c", None, swap_from(R))
    d, e = ("d",) + nxt[1:], ("e",) + wait[1:]
    f, g = ("f", None, grant), ("g",) + restore[1:]
    bc = [[b, c]] if variant == "buggy" else [[b], [c]]
    return [[reset], [a]] + bc + [[d, e], [crit], [f], [g]]


def program(variant, rounds):
    return [[ph for _ in range(rounds) for ph in thread_round(i, variant)] for i in range(N)]


def initial():
    return ((), 0, 0, (G, P, P), (1, 2), (1, 2), (BOT, BOT), (BOT, BOT), (BOT, BOT))


def explore(variant, rounds):
    prog = program(variant, rounds)
    start = (initial(), tuple((0, frozenset()) for _ in range(N)))
    depth = {start: 0}
    frontier = deque([start])
    first = {}
    terminals = 0
    while frontier:
        cfg = frontier.popleft()
        s, pcs = cfg
        at_crit = [i for i in range(N) if pcs[i][0] < len(prog[i]) and prog[i][pcs[i][0]][0][0] == "crit"]
        checks = {"invariant": inv(s), "queued_pending": queued_pending(s),
                  "mutual_exclusion": len(at_crit) <= 1 and all(s[Q][:1] == (i,) for i in at_crit)}
        for k, ok in checks.items():
            if not ok and k not in first:
                first[k] = depth[cfg]
        moved = False
        for i in range(N):
            ph, done = pcs[i]
            if ph >= len(prog[i]):
                continue
            phase = prog[i][ph]
            for k, (label, guard, eff) in enumerate(phase):
                if k in done or (guard and not guard(s)):
                    continue
                moved = True
                nd = done | {k}
                npc = (ph + 1, frozenset()) if len(nd) == len(phase) else (ph, frozenset(nd))
                nxt = (eff(s), pcs[:i] + (npc,) + pcs[i + 1:])
                if nxt not in depth:
                    depth[nxt] = depth[cfg] + 1
                    frontier.append(nxt)
        if not moved and all(pcs[i][0] >= len(prog[i]) for i in range(N)):
            terminals += 1
    return {"configs": len(depth), "states": len({c[0] for c in depth}), "terminals": terminals,
            "first_violation_depth": first}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", help="golden JSON to compare against")
    args = ap.parse_args()
    out = {"invariant_states": invariant_count()}
    for v in ("annotated", "hw", "buggy"):
        for rounds in (1, 2):
            out[f"{v}_r{rounds}"] = explore(v, rounds)
    text = json.dumps(out, indent=2, sort_keys=True)
    if args.check:
        with open(args.check) as f:
            golden = json.load(f)
        if golden != json.loads(text):
            print(text)
            print("oracle output differs from", args.check, file=sys.stderr)
            return 1
        print("oracle matches", args.check)
        return 0
    print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
