from ._clothtrack import (
    CameraIntrinsics,
    CameraPose,
    ClothParams,
    MeshState,
    MeshTopology,
    ScenarioData,
    ScenarioKind,
    ScenarioSpec,
    backproject_flat,
    build_mesh,
    generate_scenario,
    project,
    shape_weights,
    step_mesh,
    track_scenario,
)

__all__ = [
    "CameraIntrinsics",
    "CameraPose",
    "ClothParams",
    "MeshState",
    "MeshTopology",
    "ScenarioData",
    "ScenarioKind",
    "ScenarioSpec",
    "backproject_flat",
    "build_mesh",
    "generate_scenario",
    "project",
    "shape_weights",
    "step_mesh",
    "track_scenario",
]
