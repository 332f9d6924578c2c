DEFAULT_RESTARTS = 200
DEFAULT_SAMPLING_BOX = (-1.0, 1.0)
DEFAULT_XATOL = 1e-10
DEFAULT_FATOL = 1e-12
DEFAULT_SEED = 0
DEFAULT_LOCAL_SEARCH = "nelder-mead"
BFGS_GTOL = 1e-8
DEFAULT_THREADS = 1

# fidelity 1 "up to the sixth decimal place"
DEFAULT_EPSILON = 1e-6
DEFAULT_THRESHOLD_LEVEL = 0.99
FIDELITY_DISPLAY_DECIMALS = 6

MIN_STEP = 1e-4
MAX_STEP = 1e-1
REFINE_JUMP = 0.05
REFINE_ROUNDS = 6

HERMITIAN_TOLERANCE = 1e-12
NORM_TOLERANCE = 1e-10
INVARIANCE_TOLERANCE = 1e-10
LEVEL_GAP_TOLERANCE = 1e-8

# approximate claimed times are scanned over t ± this window
APPROXIMATE_TIME_WINDOW = 0.05
EXACT_CLAIM_TOLERANCE = 1e-6
APPROXIMATE_CLAIM_TOLERANCE = 1e-4

# delta h of the maximally spread two-level normalised hamiltonian
MAX_TWO_LEVEL_DELTA_H = 0.5

CURVE_FILE_NAME = "curve.csv"
SUMMARY_FILE_NAME = "summary.json"
MANIFEST_FILE_NAME = "manifest.json"
CONFIG_SNAPSHOT_FILE_NAME = "config.json"
VERIFY_FILE_NAME = "verify.json"
COMPONENTS_FILE_NAME = "components.csv"
TRADEOFF_FILE_NAME = "tradeoff.csv"
CATALOG_FILE_NAME = "catalog.json"

OUTPUT_PIPELINES = {
    "two_body_qsl.pipelines.PrepareOutputDirPipeline": 100,
    "two_body_qsl.pipelines.SaveCurveTablePipeline": 200,
    "two_body_qsl.pipelines.SaveTablePipeline": 250,
    "two_body_qsl.pipelines.SaveSummaryPipeline": 300,
    "two_body_qsl.pipelines.SaveDocumentPipeline": 350,
    "two_body_qsl.pipelines.SaveConfigSnapshotPipeline": 400,
    "two_body_qsl.pipelines.SaveManifestPipeline": 500,
}

LOG_FORMAT = "%(asctime)s [%(name)s] %(levelname)s: %(message)s"
PROGRESS_LOGGER_NAME = "two_body_qsl.progress"

# 17 significant digits round-trip every float64 exactly
FLOAT_FORMAT = ".17g"
