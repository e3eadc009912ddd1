from .triple import Triple, PredictionRecord

__all__ = ['Triple', 'PredictionRecord']
