"""stillmotion: turn a still image into a short animation.

Click-guided subject segmentation, diffusion inpainting of the background,
and deformation of a textured triangle mesh (waves or a squash-and-stretch
jump), rendered to PNG frames or a looping GIF.
"""

from .imagecore import (
    ClickSet,
    ImageBuffer,
    Mask,
    ScalarField,
    canny_edges,
    connected_components,
    dilate,
    distance_transform,
    erode,
    load_image,
    save_image,
    sobel_gradient,
)
from .inpaint import InpaintConfig, InpaintOutcome, inpaint_diffusion, make_background
from .meshanim import (
    AnimationSpec,
    JumpTimeline,
    Mesh,
    PoseParams,
    WaveParams,
    apply_pose,
    default_jump_timeline,
    horizontal_wave,
    jump_pose,
    make_grid_mesh,
    sample_timeline,
    vertical_wave,
)
from .pipeline import PipelineConfig, load_config, run_pipeline, run_stage
from .render import Frame, Scene, build_scene, composite_frame, encode_gif, rasterize_mesh, write_frame_sequence
from .segmentation import (
    ClusterModel,
    FeatureField,
    build_feature_field,
    extract_subject,
    kmeans,
    refine_mask,
)

__version__ = "0.1.0"
