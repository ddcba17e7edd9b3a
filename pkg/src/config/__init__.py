from .instance_file import InstanceFile
from .manager import ConfigManager, OutputFormat, RunConfig

__all__ = ["ConfigManager", "InstanceFile", "OutputFormat", "RunConfig"]
