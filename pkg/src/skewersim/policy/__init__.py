"""Dataset generation, augmentation, policy training and inference."""

from .augment import AugmentationConfig, augment, augment_set, jitter_hue, rotate_image, warp_trace
from .dataset import (
    DATASET_MIX,
    LABEL_ANGLED,
    LABEL_NAMES,
    LABEL_VERTICAL,
    Example,
    example_from_json,
    example_to_json,
    generate_dataset,
    label_for,
    overhead_crop,
    read_examples_jsonl,
    record_example,
    write_examples_jsonl,
)
from .model import (
    EMBED_DIM,
    MODE_HAPTIC,
    MODE_MULTIMODAL,
    MODE_OPENLOOP,
    MODE_VISION,
    MODES,
    TRACE_SCALE,
    PolicyModel,
    infer_primitive,
)
from .train import (
    TrainedPolicy,
    accuracy,
    arrays_for,
    export_embeddings,
    predict_labels,
    sample_efficiency_sweep,
    subset_accuracy,
    train_policy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
