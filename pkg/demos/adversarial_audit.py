"""Auditing a certified stop from the adversary's side.

A certificate is a proof against every function consistent with the
observations, so the natural stress test is to construct one: a cone
bump that vanishes at all queried points (the perturbed run is bitwise
identical) yet moves the optimum.  One query before the certified stop
such a witness still exists at some fine scale, showing the stop was not
wasteful.  At the stop itself any witness must live strictly below the
certified accuracy, which is the certificate doing its job.
"""

from __future__ import annotations

import lipcert as lc


def describe(report, eps: float) -> None:
    print(f"  audited after n = {report.n} queries")
    print(f"  ladder tried: {', '.join(f'{s:g}' for s in report.scales_tried)}")
    if report.case_fired == "inconclusive":
        print("  no witness found at any scale tried")
        return
    print(f"  witness at eps~ = {report.eps_tilde:g}  ({report.case_fired})")
    print(f"  bump center {report.center}, support radius factor {report.headroom_factor:g}")
    print(f"  perturbed replays matched the original run bitwise: {report.coincidence}")
    print(f"  proven regret of the recommendation: {report.regret_achieved:g} "
          f"(>= 3 * eps~ = {3 * report.eps_tilde:g})")
    below = report.eps_tilde < eps
    print(f"  witness scale below the certified accuracy: {below}")


def main() -> None:
    fn = lc.get_function("halftent-d1")
    eps = 1.0 / 16.0
    print(f"{fn.label}: bound L={fn.lip_bound}, true constant {fn.exact_lip}; the")
    print("gap between them is the headroom the adversary spends.")
    print()

    before = lc.audit_certified_run(fn, eps)
    print(f"one query before the certified stop (eps = {eps:g}):")
    describe(before, eps)
    print()

    at_stop = lc.audit_certified_run(fn, eps, n_override=before.n + 1)
    print("at the certified stop:")
    describe(at_stop, eps)


if __name__ == "__main__":
    main()
