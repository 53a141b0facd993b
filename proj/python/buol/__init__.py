# Copyright 2026 The buol Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Bottom-up panoptic 3D reconstruction: lifting, grouping and PRQ."""

from ._core import (
    CameraIntrinsics,
    DepthPlanes,
    DomainError,
    PanopticVolume,
    ParseError,
    PlacementError,
    ShapeError,
    backproject,
    derive_priors,
    generate_scene,
    occupancy_aware_lift,
    oracle_reconstruction,
    plane_index,
    prq,
    project,
    set_thread_count,
    thread_count,
    tsdf,
)

__all__ = [
    "CameraIntrinsics",
    "DepthPlanes",
    "DomainError",
    "PanopticVolume",
    "ParseError",
    "PlacementError",
    "ShapeError",
    "backproject",
    "derive_priors",
    "generate_scene",
    "occupancy_aware_lift",
    "oracle_reconstruction",
    "plane_index",
    "prq",
    "project",
    "set_thread_count",
    "thread_count",
    "tsdf",
]
