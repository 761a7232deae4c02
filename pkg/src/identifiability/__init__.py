"""Profile-likelihood identifiability analysis for closed-form process models."""

from .data import Dataset, generate_synthetic, read_dataset, write_dataset
from .errors import (ConfigError, DatasetError, DomainError, NumericalError, SchemaError,
                     StarvationError)
from .likelihood import LikelihoodProblem, NormalizedLikelihood, loglikelihood, normalize
from .models import ParameterVector, ProcessModelSpec, evaluate_model, reparam_map
from .noise import NoiseSpec
from .optim import OptimizerSettings, OptimResult, find_mle, nelder_mead_maximize
from .predict import PredictionBand, prediction_band, sample_confidence_set
from .profile import ProfileGrid, ProfileResult, profile_parameter, threshold_interval

__version__ = "0.1.0"
