"""Transmit beamforming for joint radar-communication.

Thin bindings over the C++ core: scenario construction, closed-form and
relaxation designs, CRB and SINR metrics, verification checks and the figure
experiments.
"""
from ._dfrc import (
    ArrayGeometry,
    DesignSolution,
    DfrcError,
    Scenario,
    achieved_sinrs,
    beampattern,
    check_kkt_point,
    check_rank_condition,
    check_schur,
    config_hash,
    crb_extended,
    crb_point_alpha,
    crb_point_theta,
    design_extended_multi,
    design_extended_single,
    design_point_multi,
    design_point_single,
    eig_F,
    eig_truncation_baseline,
    make_scenario,
    run_experiment,
    steering,
    steering_deriv,
)

__version__ = "0.1.0"
