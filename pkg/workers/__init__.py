from .ablation_worker import AblationWorker
from .ablation_processor import AblationProcessor

__all__ = ['AblationWorker', 'AblationProcessor']
