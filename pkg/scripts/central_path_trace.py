"""Print the central-path trace of the barrier solver on the embedded d=4
counterexample (or any state-set file).

    python scripts/central_path_trace.py [states.json]
"""

import sys

from antidist import counterexample
from antidist.sdp import AntidistInstance, SolverConfig, solve
from antidist.states import load_state_set


def main(argv):
    states = load_state_set(argv[0]) if argv else counterexample.load_states()
    inst = AntidistInstance.from_states(states)
    result = solve(inst, SolverConfig())
    nd = inst.n * inst.dim
    print(f"{'t':>10} {'newton':>6} {'Tr(Y)':>22} {'gap':>11} {'gap*t/(nd)-1':>13} {'stationarity/t':>15}")
    for s in result.stages:
        print(
            f"{s.t:>10.1e} {s.newton_steps:>6d} {s.beta:>22.15g} {s.gap:>11.3e} "
            f"{s.gap * s.t / nd - 1:>13.1e} {s.stationarity / s.t:>15.1e}"
        )
    print(f"alpha={result.alpha:.15g} beta={result.beta:.15g} gap={result.gap:.3e}")
    print(f"POVM completeness residual {result.primal_residual:.1e}, min slack eigenvalue {result.dual_min_slack_eig:.3e}")


if __name__ == "__main__":
    main(sys.argv[1:])
