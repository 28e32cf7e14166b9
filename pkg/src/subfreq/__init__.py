"""Projected frequency estimation: summaries of an ``n x d`` array that answer
statistics of column projections chosen after the data has been seen."""

from .dataset import (
    ColumnQuery,
    Dataset,
    decode_pattern,
    encode_pattern,
    load_dataset,
    pattern_ids,
    project,
    save_dataset,
)
from .errors import CapacityError, CodeSamplingError, DatasetFormatError, SubfreqError
from .oracle import (
    FrequencyVector,
    frequency_vector,
    heavy_hitters,
    lp_sample,
    moment,
    point_frequency,
)
from .sampling import (
    RowSample,
    build_sample,
    estimate_frequency,
    sample_heavy_hitters,
    sample_size,
)
from .netsketch import (
    AlphaNet,
    SketchNet,
    SketchSpec,
    build_net,
    build_sketchnet,
    emit_figure_data,
    net_size_bound_exact,
    entropy,
    query,
    round_query,
    rounding_distortion,
    tradeoff_table,
)
from .codes import Code, enumerate_constant_weight, sample_random_code, star, star_set
from .hardgen import (
    HardInstance,
    gen_f0,
    gen_f0_center,
    gen_fp,
    gen_hh,
    gen_lpsample,
    reduce_alphabet,
)

__version__ = "0.1.0"
