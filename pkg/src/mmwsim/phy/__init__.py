from .cqi import CqiTable, build_cqi_table, cqi_from_subbands, sinr_to_cqi
from .error_model import (
    DecodeOutcome,
    MiesmTable,
    TransportBlock,
    bler_for_sinr,
    build_transport_block,
    codeblock_bler,
    decide_decode,
    default_miesm_table,
    effective_mmib,
    effective_sinr,
    load_miesm_table,
    segment_transport_block,
    sinr_to_mmib,
    tb_bler,
    transport_block_bler,
)
from .sinr import LinkTerms, SinrRecord, compute_sinr, rx_power_dbm, thermal_noise_psd
