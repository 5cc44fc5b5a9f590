from .boxes import Box, Interval, Periodic, box_distance, parse_box
from .game import (FiberedStrategy, FiniteSpace, GameTranscript, MetricFamily, RDecomposition,
                   Strategy, StrategyFailure, Subgroup, SubgroupUnionStrategy, UniformlyExpansiveMap,
                   ZnStrategy, direct_sum_ball, fibered_strategy, is_uniformly_bounded,
                   pullback_decomposition, run_game, strategy_zn, subgroup_union_strategy,
                   verify_decomposition)
from .transcript import transcript_to_json, verify_transcript
