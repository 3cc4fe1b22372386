"""scikit-learn style wrappers around the diffusion solvers."""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import metrics, solver
from .diffusivity import Diffusivity
from .solver import SolverConfig
from .validation import check_image, check_mask


class _DiffusionParams(BaseEstimator):
    def _config(self):
        return SolverConfig(
            model=self.model,
            tau=self.tau,
            sigma=self.sigma,
            diffusivity=Diffusivity(self.diffusivity, self.lam),
            mu3=self.mu3,
            fsi_n=self.fsi_n,
            stop_tol=self.tol,
            max_cycles=self.max_cycles,
            use_fsi=self.use_fsi,
            init=self.init,
            intensity_scale=self.intensity_scale,
        )


class DiffusionInpainter(TransformerMixin, _DiffusionParams):
    """Fill unknown pixels with the steady state of a diffusion PDE.

    ``fit`` records the known-pixel mask; ``transform`` takes an image whose
    known pixels hold the data to keep and returns the reconstruction.
    Colour images (``(h, w, c)``) are processed channel by channel.

    Parameters
    ----------
    model : {"foeed", "eed", "li1", "li2", "youkaveh", "hajiaboli"}
    tau : float or None
        Time step; None picks 0.25 for EED and 0.05 otherwise.
    sigma : float
        Gaussian presmoothing for the structure tensor.
    lam : float
        Contrast parameter, on the intensity scale divided by
        ``intensity_scale``.
    diffusivity : str
    mu3 : {"gmean", "amean", "one"}
    fsi_n : int
        Inner steps per FSI cycle.
    tol : float
        Stop when the L2 change over one cycle falls below this.
    max_cycles : int
    use_fsi : bool or None
        None enables FSI for EED and FOEED and uses explicit steps otherwise.
    init : {"mean", "zero", "nearest"}
    intensity_scale : float

    Attributes
    ----------
    mask_ : ndarray of bool
    config_ : SolverConfig
    reports_ : list of RunReport
        One per channel of the last ``transform`` call.
    """

    def __init__(self, model="foeed", tau=None, sigma=1.0, lam=0.1,
                 diffusivity="charbonnier", mu3="gmean", fsi_n=40, tol=1e-4,
                 max_cycles=10000, use_fsi=None, init="mean", intensity_scale=255.0):
        self.model = model
        self.tau = tau
        self.sigma = sigma
        self.lam = lam
        self.diffusivity = diffusivity
        self.mu3 = mu3
        self.fsi_n = fsi_n
        self.tol = tol
        self.max_cycles = max_cycles
        self.use_fsi = use_fsi
        self.init = init
        self.intensity_scale = intensity_scale

    def fit(self, X, y=None, mask=None):
        X = check_image(X)
        self.config_ = self._config()
        self.mask_ = check_mask(mask, X.shape[:2])
        return self

    def transform(self, X):
        check_is_fitted(self, "mask_")
        X = check_image(X)
        if X.shape[:2] != self.mask_.shape:
            raise ValueError(f"image shape {X.shape[:2]} does not match fitted mask {self.mask_.shape}")
        u, self.reports_ = solver.run_channelwise(X, self.mask_, self.config_)
        return u

    @property
    def converged_(self):
        check_is_fitted(self, "reports_")
        return all(r.converged for r in self.reports_)

    def score(self, X, y):
        """Negative MSE of the reconstruction of ``X`` against the reference ``y``."""
        return -metrics.mse(self.transform(X), np.asarray(y, dtype=float))


class DiffusionSmoother(TransformerMixin, _DiffusionParams):
    """Pure smoothing: ``n_steps`` explicit steps with no pixels held fixed."""

    def __init__(self, model="foeed", n_steps=100, tau=None, sigma=1.0, lam=0.1,
                 diffusivity="charbonnier", mu3="gmean", intensity_scale=255.0):
        self.model = model
        self.n_steps = n_steps
        self.tau = tau
        self.sigma = sigma
        self.lam = lam
        self.diffusivity = diffusivity
        self.mu3 = mu3
        self.intensity_scale = intensity_scale

    def fit(self, X, y=None):
        check_image(X)
        self.config_ = SolverConfig(
            model=self.model, tau=self.tau, sigma=self.sigma,
            diffusivity=Diffusivity(self.diffusivity, self.lam), mu3=self.mu3,
            intensity_scale=self.intensity_scale,
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        X = check_image(X)
        if X.ndim == 2:
            return solver.smooth_run(X, self.config_, self.n_steps)
        return np.stack([solver.smooth_run(X[..., c], self.config_, self.n_steps)
                         for c in range(X.shape[2])], axis=-1)
