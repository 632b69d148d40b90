#!/usr/bin/env python3
"""Adequacy report over the bundled corpus.

For every judgment of every bundled system (under each encoding mode its
sort file provides) this runs the full pipeline -- translate, kernel-check
the image, invert, simulate the computation, conservatively invert a few
beta-expanded variants -- and prints one line per judgment with timings.

Usage:
    python3 scripts/adequacy_report.py [--variants N] [--seed S] [--fuel F]
"""

import argparse
import random
import sys
import time

from pimod.corpus import load_cases
from pimod.decode import adequacy_roundtrip, conservative_invert, invert
from pimod.encode import expected_dk_type, generate, translate, translate_ctx
from pimod.epts import elaborate, elaborate_context, epts_redex_sorts, epts_step
from pimod.kernel import TypingConfig, check as dk_check, infer as dk_infer
from pimod.rewrite import DEFAULT_FUEL
from pimod.terms import App, Lam, Var


def wrap_root(theory, ctx, t, times):
    """Identity beta-expansions at the root: ``(lam w : T. w) t``, iterated."""
    for _ in range(times):
        t = App(Lam("w", dk_infer(theory, ctx, t), Var(0)), t)
    return t


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--variants", type=int, default=3,
                    help="beta-expanded variants per judgment (default 3)")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    cfg = TypingConfig(fuel=args.fuel)

    header = f"{'judgment':<34} {'check':>8} {'invert':>7} {'steps':>5} {'variants':>8}"
    print(header)
    print("-" * len(header))
    failures = 0
    for case in load_cases():
        enc = generate(case.spec)
        ctx = elaborate_context(case.spec, case.file.assumes, fuel=args.fuel)
        dctx = translate_ctx(enc, ctx, fuel=args.fuel)
        for j in case.file.judgments:
            label = f"{case.label}/{j.name}"
            try:
                m = elaborate(case.spec, ctx, j.term, fuel=args.fuel)
                a = elaborate(case.spec, ctx, j.type, fuel=args.fuel)
                img = translate(enc, m)

                t0 = time.perf_counter()
                dk_check(enc.theory, dctx, img,
                         expected_dk_type(enc, ctx, a, fuel=args.fuel), cfg)
                check_ms = (time.perf_counter() - t0) * 1000

                ok_inv = invert(enc, img) == m

                steps = 0
                cur = m
                while epts_redex_sorts(enc.spec, cur) is not None:
                    cur = epts_step(enc.spec, cur)
                    steps += 1

                ok_var = 0
                for k in range(args.variants):
                    fat = wrap_root(enc.theory, dctx, img, 1 + rng.randrange(2))
                    if conservative_invert(enc, ctx, fat, a, fuel=args.fuel) == m:
                        ok_var += 1

                diags = adequacy_roundtrip(enc, ctx, m, fuel=args.fuel)
                ok = ok_inv and ok_var == args.variants and not diags
                print(f"{label:<34} {check_ms:>6.1f}ms "
                      f"{'yes' if ok_inv else 'NO':>7} {steps:>5} "
                      f"{ok_var:>5}/{args.variants}"
                      + ("" if not diags else
                         "   " + "; ".join(d.code for d in diags)))
                failures += 0 if ok else 1
            except Exception as e:
                print(f"{label:<34} ERROR: {type(e).__name__}: {e}")
                failures += 1
    print("-" * len(header))
    print("all judgments adequate" if not failures
          else f"{failures} judgment(s) FAILED")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
