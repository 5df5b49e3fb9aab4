"""Layer-normalization networks: class-separability analysis, constructive
memorization with width-3 LN-Nets, and Hessian nonlinearity measures."""

from .config import DEFAULT, Tolerances
from .datasets import LabeledDataset, gen_gaussian_pair, gen_random_labels, gen_benchmark_pair, gen_xor, load_csv, save_csv
from .errors import LnNetError
from .net import LN, LNG, Affine, LnNet, deserialize, forward, forward_batch, serialize
from .nonlinearity import group_ratio_report, hessian_measure_fd, hessian_measure_ln_closed, hessian_measure_lng_closed
from .ssr import ClassPair, break_lssr, lssr, ssr
from .synthesis import classify, shatter_check, synthesize, synthesize_binary, synthesize_multiclass

__version__ = "0.1.0"

__all__ = [
    "DEFAULT", "Tolerances",
    "LabeledDataset", "gen_gaussian_pair", "gen_random_labels", "gen_benchmark_pair", "gen_xor", "load_csv", "save_csv",
    "LnNetError",
    "LN", "LNG", "Affine", "LnNet", "deserialize", "forward", "forward_batch", "serialize",
    "group_ratio_report", "hessian_measure_fd", "hessian_measure_ln_closed", "hessian_measure_lng_closed",
    "ClassPair", "break_lssr", "lssr", "ssr",
    "classify", "shatter_check", "synthesize", "synthesize_binary", "synthesize_multiclass",
]
