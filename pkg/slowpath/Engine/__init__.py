from slowpath.Engine.experiment import ComparisonReport, ExperimentManifest, load_manifest, run_experiment
from slowpath.Engine.profiler import ProfileReport, profile
from slowpath.Engine.session import Session, Transcript, applicability_probe, generate, start_session, step
