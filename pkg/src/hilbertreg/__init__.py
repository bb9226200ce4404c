"""Hilbert kernel interpolating regression with closed-form risk asymptotics
and a seeded Monte Carlo verification harness."""

__version__ = "0.1.0"

from .geometry import (
    Dataset,
    WeightVector,
    hilbert_weights,
    lagrange_value,
    pairwise_min_distance,
    weights_on_grid,
)
from .estimators import (
    HilbertKind,
    HilbertPluginClassifier,
    HilbertRegressor,
    Prediction,
    ShepardKind,
    ShepardRegressor,
    WiNNKind,
    WiNNRegressor,
    evaluate_on_grid,
    hilbert_regress,
    plugin_classify,
    shepard_regress,
    winn_regress,
)
from .densities import (
    BernoulliFromTarget,
    ClampedLogistic,
    Constant,
    DensityModel,
    GaussianConstant,
    GaussianHetero,
    Linear,
    NoiseModel,
    RadialHeavyTail,
    Sine1D,
    SupportQuery,
    TargetFunction,
    Triangular1D,
    UniformBall,
    UniformBox,
    replicate_stream,
    sample_dataset,
)
from .asymptotics import (
    AsymptoticPrediction,
    DivergenceError,
    QuadratureError,
    ScaleWn,
    extrapolation_limit,
    kappa,
    kappa_beta,
    lagrange_prediction,
    lagrange_scale_Z,
    lambda_weight,
    predict_bias,
    predict_classification_bound,
    predict_exceedance,
    predict_moment,
    predict_regression_risk,
    predict_variance,
    rho_zero_limit,
    scaling_cdf,
    scaling_pdf,
    solve_wn,
    unit_ball_volume,
)
