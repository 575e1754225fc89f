from .beamforming import BeamformingPair, beamforming_gain, power_iteration_beamforming
from .fading import (
    ChannelRealization,
    SpatialChannel,
    SubpathParams,
    assemble_channel,
    beam_projections,
    beamformed_gains,
    doppler_shift,
    small_scale_gain,
    subpath_gains,
    ula_signature,
    update_large_scale,
)
from .pool import ClusterStats, generate_realization_pool, load_pool, save_pool
from .propagation import (
    LOS_PATHLOSS,
    NLOS_PATHLOSS,
    FixedLinkState,
    LinkState,
    LinkStateModel,
    PathlossParams,
    draw_shadowing,
    link_budget_dbm,
    pathloss_db,
    select_link_state,
)
