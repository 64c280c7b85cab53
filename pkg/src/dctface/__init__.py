"""Face identification from DCT coefficients of the whole face and four local regions."""

from .config import PipelineConfig, load_config
from .dct import (
    CoeffVector,
    dct_1d,
    dct_2d,
    energy_fraction,
    idct_1d,
    idct_2d,
    inverse_zigzag,
    truncate,
    zigzag_scan,
)
from .evaluation import DatasetManifest, ExperimentReport, cmc_curve, far_frr, recognition_rate, run_experiment
from .features import (
    DEFAULT_SPECS,
    LOCAL_REGIONS,
    REGIONS,
    FaceLandmarks,
    FaceTemplate,
    Point,
    RegionSpec,
    build_template,
    crop_centered,
    read_landmarks,
)
from .fusion import (
    Decision,
    FeatureWeights,
    FusionMethod,
    default_weights,
    fuse_weighted,
    identify,
    minmax_normalize,
    verify,
)
from .gallery import Gallery, load_gallery, save_gallery
from .image_io import GrayImage, load_pgm, mean_intensity, normalization_factor, read_pgm, save_pgm, scale_image
from .matching import MatchScore, RankList, coeff_distance, rank_gallery

__version__ = "0.1.0"
