from .data import Normalizer, load_records, records_to_arrays
from .grids import detokenize, grid_tau, tokenize
from .infer import Predictor
from .model import SetPredictorModel, SurrogateConfig
from .train import train, train_from_file

__version__ = "0.1.0"

__all__ = [
    "Normalizer", "Predictor", "SetPredictorModel", "SurrogateConfig",
    "detokenize", "grid_tau", "load_records", "records_to_arrays",
    "tokenize", "train", "train_from_file",
]
