"""
Configuration settings for growgraph
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    def __init__(self):
        # Runtime (never influences experiment output)
        self.log_level = os.getenv("GROWGRAPH_LOG_LEVEL", "INFO").upper()
        self.workers = max(1, int(os.getenv("GROWGRAPH_WORKERS", "1")))

        # Size guards
        self.max_canonical_vertices = 8
        self.max_enumeration_vertices = 6
        self.max_oracle_vertices = 6
        self.max_pattern_vertices = 6
        self.max_hom_vertices_small_pattern = 10_000  # m <= 3
        self.max_hom_vertices_large_pattern = 512     # m in {4, 5, 6}
        self.max_expected_hom_vertices = 10_000

        # Numerics
        self.table_quadrature_panels = 4096
        self.max_materialized_law = 100_000
        self.bernoulli_trial_cap = 1_000

        # Monte Carlo
        self.mc_chunk_size = 1_000
        self.equivalence_threshold = 0.015

    def validate(self) -> bool:
        return self.workers >= 1 and self.log_level in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


config = Config()
