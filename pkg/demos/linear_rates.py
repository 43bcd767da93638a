"""Linear rates under Bregman growth, measured against the predicted factor.

For the quartic test problem the growth constant relative to the quartic
kernel is 1/3, and the Lyapunov value Gamma_k should shrink at least as fast
as 1/(1 + alpha mu) per step. The fitted slope of log Gamma_k shows how much
room the bound leaves. The second table lists where the guaranteed factor
beats the best previously known factor for delayed proximal gradients.

    python demos/linear_rates.py
"""

import numpy as np

from pliag import diagnostics as dg
from pliag import stepsizes as ss
from pliag.cli import rates_table
from pliag.solver import named_method, run
from pliag import problems as pb
from pliag.suites import demo_quartic


def main():
    q = demo_quartic()
    mu = q.growth.mu
    print(f"quartic problem, L = {q.L_sum}, mu = {mu:.4f}")
    # delays need more than one component: split the three terms apart
    split = pb.make_quartic_problem(np.eye(2), np.zeros((1, 2)), np.eye(2), [0.0], [0.0, 0.0],
                                    box=([-1.5, -1.5], [1.5, 1.5]), x0=[1.0, -0.5], split=True)
    for tau in (0, 1, 3):
        tag = "nolips" if tau == 0 else "ne_piag"
        problem = q if tau == 0 else split
        trace = run(named_method(tag, problem, tau=tau, K=300, step="linear", mu=mu))
        cert = dg.certify_linear(trace)
        slope = dg.log_slope(cert.observed[:150])
        predicted = np.log(ss.rate_linear(trace.alpha, mu))
        print(f"  tau={tau}  alpha={trace.alpha:.4f}  predicted log-rate={predicted:.4f}  "
              f"observed={slope:.4f}  certificate={'pass' if cert.passed else 'FAIL'}")

    print("\nguaranteed factor vs best known, Q = 100")
    print(rates_table([100.0], [0, 10, 46, 47, 48, 60]), end="")


if __name__ == "__main__":
    main()
