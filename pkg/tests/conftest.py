"""Shared test helpers: model factories and the finite-difference oracle."""

import numpy as np

import gaussmap as gm

# Tolerances for the analytic-vs-finite-difference gradient comparison.
GRADCHECK_REL_TOL = 1e-4
GRADCHECK_ABS_TOL = 1e-7


def random_model(rng, m, d1, d2, epsilon=1e-8, sigma_range=(0.5, 2.0),
                 matrix_scale=0.8):
    centers = rng.normal(size=(m, d1))
    sigmas = rng.uniform(*sigma_range, size=m)
    matrices = rng.uniform(-matrix_scale, matrix_scale, size=(m, d2, d1))
    return gm.ModelParams(centers=centers, sigmas=sigmas, matrices=matrices,
                          epsilon=epsilon)


def single_unit_model(matrix, center=None, sigma=1.0, epsilon=1e-8):
    matrix = np.asarray(matrix, dtype=float)
    d2, d1 = matrix.shape
    if center is None:
        center = np.zeros(d1)
    return gm.ModelParams(centers=[center], sigmas=[sigma], matrices=[matrix],
                          epsilon=epsilon)


def finite_difference_gradients(model, data, pairs, optimize_centers):
    """Central finite differences of the loss for every trainable parameter.

    Steps are 1e-5 on each parameter's own scale. Independent of the
    analytic-gradient code path: only gm.loss is evaluated.
    """
    arrays = {
        "matrices": np.array(model.matrices),
        "sigmas": np.array(model.sigmas),
        "centers": np.array(model.centers),
    }
    names = ["matrices", "sigmas"] + (["centers"] if optimize_centers else [])

    def rebuild():
        return gm.ModelParams(centers=arrays["centers"], sigmas=arrays["sigmas"],
                              matrices=arrays["matrices"], epsilon=model.epsilon)

    result = {}
    for name in names:
        target = arrays[name]
        grad = np.zeros_like(target)
        it = np.nditer(target, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            origin = target[idx]
            h = 1e-5 * max(1.0, abs(origin))
            target[idx] = origin + h
            upper = gm.loss(rebuild(), data, pairs)
            target[idx] = origin - h
            lower = gm.loss(rebuild(), data, pairs)
            target[idx] = origin
            grad[idx] = (upper - lower) / (2.0 * h)
        result[name] = grad
    return result


def gradcheck_max_error(analytic, numeric):
    """Worst relative discrepancy, with an absolute floor near zero."""
    worst = 0.0
    for name, num in numeric.items():
        ana = analytic[name]
        scale = np.maximum(GRADCHECK_ABS_TOL / GRADCHECK_REL_TOL,
                           np.maximum(np.abs(ana), np.abs(num)))
        worst = max(worst, float(np.max(np.abs(ana - num) / scale)))
    return worst
