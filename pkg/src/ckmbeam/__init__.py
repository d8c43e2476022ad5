"""Environment-aware, training-free beam alignment via channel knowledge maps.

Desk-scale simulator for mmWave massive MIMO beam alignment: a deterministic
image-method ray tracer generates site-specific ground-truth multipath data,
channel path maps (CPM) and beam index maps (BIM) are built from finite
location-tagged samples, and the training-free map-based schemes are compared
against training-based baselines by effective communication rate.
"""

from .geometry import AnglePair, UpaConfig, direction_from_angles, angles_from_direction, steering_vector
from .channel import Path, PathSet, synthesize_channel, beamformed_gain
from .codebook import Codebook, BeamPair, build_codebook, best_beam_pair, nearest_codeword
from .scene import Scene, Box, GroundTruthSample, trace_paths, los_blocked, generate_dataset
from .ckm import CpmDatabase, BimDatabase, build_cpm, cpm_query, build_bim, bim_query, save_ckm, load_ckm
from .metrics import LinkBudget, effective_rate, average_rate
from .locerror import LocationErrorModel

__version__ = "0.1.0"
