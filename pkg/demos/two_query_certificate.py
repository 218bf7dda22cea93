"""Certifying in two queries with a good candidate set.

On the unit disc with f equal to the distance from the center, the
maximum sits everywhere on the boundary circle.  The candidate-set
sawtooth method first queries the center, then the candidate with the
highest optimistic bound, which is an exact boundary point kept in the
candidate ring by construction.  Its certificate immediately drops to
the Lipschitz bound times the covering radius of the candidate set, so
a coarse target is certified after just two evaluations, while the
tree-search route needs dozens of cells for the same guarantee.
"""

from __future__ import annotations

import numpy as np

import lipcert as lc


def main() -> None:
    fn = lc.get_function("cone-d2")
    eps = 0.5

    candidates = lc.candidates_for(fn.domain, fn.lip_bound, eps, fn.norm)
    print(f"candidate set: {len(candidates.points)} points, "
          f"covering radius {candidates.cover_radius:.4g} "
          f"(certifiable floor L*r = {fn.lip_bound * candidates.cover_radius:.4g})")
    on_boundary = np.isclose(np.linalg.norm(candidates.points, axis=1), 1.0).sum()
    print(f"candidates exactly on the boundary circle: {on_boundary}")
    print()

    trace = lc.ps_run_grid(fn, eps, budget=1500)
    print("candidate sawtooth run:")
    for n in range(len(trace)):
        print(f"  query {n + 1}: x = {np.round(trace.queries[n], 6).tolist()}, "
              f"f = {trace.values[n]:.6g}, certificate = {trace.certificates[n]:.6g}")
    print(f"  certified eps = {eps} after {lc.sigma_from_trace(trace)} queries")
    print()

    tree = lc.cdoo_run(fn, eps, budget=30_000)
    print(f"certified tree search on the same target: "
          f"{lc.sigma_from_trace(tree)} queries")
    print()
    print("The ring construction is what makes this honest: the certificate")
    print("only counts candidates actually coverable at the stated radius,")
    print("and a boundary extremum is in the set exactly, not approximately.")


if __name__ == "__main__":
    main()
