from .settings import RunConfig, load_run_config, settings

__all__ = ["settings", "RunConfig", "load_run_config"]
