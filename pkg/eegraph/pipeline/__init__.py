"""Dataset ingestion, split, augmentation, temporal compression and synthetic fixtures."""
from .trialset import TrialSet, load_trialset, save_trialset, split
from .augment import DEFAULT_SNR_DB, augment_awgn, count_zero_power_channels
from .compressor import CompressorSpec, Compressor, compress_forward
from .fixtures import FixtureFiles, make_fixture, make_fixture_trials

__all__ = [
    "TrialSet",
    "load_trialset",
    "save_trialset",
    "split",
    "DEFAULT_SNR_DB",
    "augment_awgn",
    "count_zero_power_channels",
    "CompressorSpec",
    "Compressor",
    "compress_forward",
    "FixtureFiles",
    "make_fixture",
    "make_fixture_trials",
]
