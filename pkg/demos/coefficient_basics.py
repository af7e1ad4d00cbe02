"""First contact with the coefficient.

The statistic ranks the responses, walks the nearest-neighbor graph of the
predictors, and rewards neighborhoods whose responses agree.  It is close
to zero under independence, approaches one when the response is a function
of the predictors (however nonlinear), and ignores any monotone
transformation of the response.
"""

import numpy as np

from manifold_xi import xi_n


def main():
    rng = np.random.default_rng(0)
    n = 2000
    x = rng.uniform(-1, 1, size=(n, 2))

    independent = rng.standard_normal(n)
    functional = np.sin(4 * x[:, 0]) * np.cos(3 * x[:, 1])
    noisy = functional + 0.3 * rng.standard_normal(n)

    print(f"independence        : {xi_n(x, independent).value:+.4f}")
    print(f"noiseless function  : {xi_n(x, functional).value:+.4f}")
    print(f"same + noise        : {xi_n(x, noisy).value:+.4f}")

    # rank invariance: any strictly increasing transform leaves it unchanged
    print(f"exp of noisy target : {xi_n(x, np.exp(noisy)).value:+.4f}  (identical)")

    # isometry invariance: rotations of the predictors do not matter
    theta = 0.7
    q = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    print(f"rotated predictors  : {xi_n(x @ q.T, noisy).value:+.4f}  (identical)")

    # the hand-checkable three-point example
    print(f"three points on a line: {xi_n([[1.], [2.], [3.]], [1., 2., 3.]).value}")


if __name__ == "__main__":
    main()
