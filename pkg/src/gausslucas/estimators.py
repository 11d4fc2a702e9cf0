"""scikit-learn style front ends for the hull and rearrangement engines."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_complex_points, check_roots
from .geometry import hull2d, sep_hull_contains, sep_hull_grid, signed_distance
from .rearrange import DEFAULT_TARGET, DEFAULT_WINDOW, power_sums_along, rearrange_to_zero
from .roots import RootSequenceFamily, estimate_genus


class ConvexHull2D(BaseEstimator):
    """Convex hull of points in C with tolerance-aware membership.

    Parameters
    ----------
    eps : float
        Membership tolerance used by :meth:`predict`.
    """

    def __init__(self, eps=0.0):
        self.eps = eps

    def fit(self, X, y=None):
        pts = check_complex_points(X, n_coords=1)[:, 0]
        if self.eps < 0:
            raise ValueError("eps must be >= 0")
        self.hull_ = hull2d(pts)
        self.vertices_ = self.hull_.as_array()
        return self

    def decision_function(self, Z):
        """Signed distance to the hull (negative strictly inside)."""
        check_is_fitted(self, "hull_")
        z = check_complex_points(Z, n_coords=1)[:, 0]
        return np.asarray(signed_distance(self.hull_, z), dtype=float)

    def predict(self, Z):
        return self.decision_function(Z) <= self.eps


class SeparatelyConvexHull(BaseEstimator):
    """Grid approximation of the separately convex hull in C^M.

    Parameters
    ----------
    resolution : int
        Cells per real axis.
    bbox : sequence of (xmin, xmax, ymin, ymax) or None
        One rectangle per complex coordinate. When None it is taken from
        the data, padded by ``padding`` times the data extent.
    iteration_cap : int
        Maximum number of convexification passes.
    """

    def __init__(self, resolution=32, bbox=None, iteration_cap=50, padding=0.1):
        self.resolution = resolution
        self.bbox = bbox
        self.iteration_cap = iteration_cap
        self.padding = padding

    def _auto_bbox(self, pts):
        out = []
        for j in range(pts.shape[1]):
            col = pts[:, j]
            ext = max(np.ptp(col.real), np.ptp(col.imag), 1.0)
            pad = self.padding * ext
            out.append((col.real.min() - pad, col.real.max() + pad,
                        col.imag.min() - pad, col.imag.max() + pad))
        return tuple(out)

    def fit(self, X, y=None):
        pts = check_complex_points(X)
        bbox = self.bbox if self.bbox is not None else self._auto_bbox(pts)
        self.grid_ = sep_hull_grid(pts, bbox, resolution=self.resolution,
                                   iteration_cap=self.iteration_cap)
        self.converged_ = self.grid_.converged
        self.n_passes_ = self.grid_.passes
        self.n_features_in_ = pts.shape[1]
        return self

    def predict(self, Z):
        """'inside', 'outside' or 'uncertain' for each row of Z."""
        check_is_fitted(self, "grid_")
        z = check_complex_points(Z, n_coords=self.n_features_in_)
        return np.array([sep_hull_contains(self.grid_, row) for row in z])


class GreedyRearranger(TransformerMixin, BaseEstimator):
    """Reorder roots so that the power sums V_N(r), r <= p, head to zero.

    ``fit`` accepts a :class:`RootSequenceFamily` or a 1D array of non-zero
    roots; ``transform`` returns the roots of the same input in the learned
    order (``fit_transform`` does both).
    """

    def __init__(self, p=None, n_target=2000, window=DEFAULT_WINDOW, target=DEFAULT_TARGET):
        self.p = p
        self.n_target = n_target
        self.window = window
        self.target = target

    def _family(self, X):
        if isinstance(X, RootSequenceFamily):
            return X
        return RootSequenceFamily.explicit(check_roots(X))

    def fit(self, X, y=None):
        fam = self._family(X)
        self.family_ = fam
        self.p_ = estimate_genus(fam).p if self.p is None else int(self.p)
        self.plan_ = rearrange_to_zero(fam, self.p_, self.n_target, window=self.window,
                                       target=self.target)
        self.status_ = self.plan_.status
        return self

    def transform(self, X):
        check_is_fitted(self, "plan_")
        fam = self._family(X)
        idx = np.asarray(self.plan_.permutation_prefix, dtype=int) - 1
        return fam.roots(int(idx.max(initial=-1)) + 1)[idx]

    def power_sums(self, N=None):
        """V_N(r) for r = 1..p along the learned order."""
        check_is_fitted(self, "plan_")
        N = len(self.plan_.permutation_prefix) if N is None else N
        return power_sums_along(self.family_, self.plan_, N)
