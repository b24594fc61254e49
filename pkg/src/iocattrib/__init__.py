"""iocattrib: cyber threat attribution from high- and low-level IOC datasets."""

from .errors import ConfigError, IocAttribError, ModelError, ParseError, ValidationError
from .featurize import (
    Dataset,
    DatasetLevel,
    FeatureSpace,
    FeatureVector,
    Instance,
    build_feature_space,
    encode_incident,
    vectorize_lowlevel,
    vectorize_matrix,
)
from .ingest import (
    ActorTechniqueMatrix,
    FeatureId,
    FeatureKind,
    IocRecord,
    StixView,
    load_lowlevel_csv,
    load_matrix_csv,
    load_stix_bundle,
    matrix_from_stix,
    validate_matrix,
    write_matrix_csv,
)
from .models import ModelSpec, TrainedModel, fit, load_model, save_model
from .evaluate import CvConfig, MetricsReport, compare_levels, compute_metrics, cross_validate, kfold_split, per_class_report
from .stats import DistributionSummary, ZTestResult, summarize_distribution, z_test
from .synth import NoiseSpec, expected_positive_count, flip_noise, synthesize_dataset
from .attribute import AttributionResult, IncidentObservation, attribute_incident, consensus

__version__ = "0.1.0"
