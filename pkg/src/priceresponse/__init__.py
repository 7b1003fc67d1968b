"""Price response functions of trade signs on the trade and physical time scales."""

__version__ = "0.1.0"

from .curve import ResponseCurve
from .lag_decomposition import Decomposition, decompose_response, shuffle_signs, shuffled_sign_baseline
from .market_data import (FormatConfig, MarketWindow, QuoteEvent, QuoteTable, TradeEvent, TradeTable,
                          filter_market_time, parse_quotes, parse_trades)
from .midpoint import (MidpointSeries, build_midpoint_series, compute_return, midpoint_sampling_diagnostic,
                       returns)
from .response import (EstimatorConfig, brute_force_response, response_activity, response_physical,
                       response_trade_scale, weights)
from .signs import SignSeries, aggregate_physical, classify_trade_scale, sign_series_for_day
from .spread import SpreadGrouping, assign_groups, average_spread, group_average_response
from .synth import SynthParams, generate, monte_carlo_response, theoretical_response
from .time_shift import ShiftScan, response_with_shift, run_shift_scan

__all__ = [
    "Decomposition", "EstimatorConfig", "FormatConfig", "MarketWindow", "MidpointSeries", "QuoteEvent",
    "QuoteTable", "ResponseCurve", "ShiftScan", "SignSeries", "SpreadGrouping", "SynthParams", "TradeEvent",
    "TradeTable", "aggregate_physical", "assign_groups", "average_spread", "brute_force_response",
    "build_midpoint_series", "classify_trade_scale", "compute_return", "decompose_response",
    "filter_market_time", "generate", "group_average_response", "midpoint_sampling_diagnostic",
    "monte_carlo_response", "parse_quotes", "parse_trades", "response_activity", "response_physical",
    "response_trade_scale", "response_with_shift", "returns", "run_shift_scan", "shuffle_signs",
    "shuffled_sign_baseline", "sign_series_for_day", "theoretical_response", "weights",
]
