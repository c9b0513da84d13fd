"""Rendering, detection, pose estimation and visual servoing."""

from .detect import CENTER_JITTER_PX, P_FALSE_NEGATIVE, P_FALSE_POSITIVE, Detection, detect_items, true_box
from .pose import NOMINAL_ITEM_HEIGHT, PoseEstimate, estimate_pose, item_mask
from .render import (
    LOCAL_MPP,
    LOCAL_SIZE,
    OVERHEAD_MPP,
    OVERHEAD_SIZE,
    LocalImage,
    OverheadImage,
    hsv_to_rgb,
    quantize,
    read_ppm,
    render_local,
    render_overhead,
    rgb_to_hsv,
    write_ppm,
)
from .servo import (
    FOOD_PEAK_THRESHOLD,
    MAX_STEPS,
    SERVO_GAIN,
    SERVO_NOISE_PX,
    STOP_OFFSET_PX,
    ServoMode,
    servo_loop,
    servo_offset,
)
from .servo_train import (
    AUGMENTED_EXAMPLES,
    BASE_EXAMPLES,
    HEATMAP_SIGMA_PX,
    HeatmapModel,
    build_servo_dataset,
    decode_keypoints,
    gaussian_heatmap,
    keypoint_error,
    shift_image,
    target_maps,
    train_servo_model,
)

__all__ = [name for name in dir() if not name.startswith("_")]
