"""
Command entry point: python main.py <command> ...
"""
from config.settings import settings
from src.cli.commands import run
from src.core.logger import LoggerFactory

if __name__ == "__main__":
    LoggerFactory.configure(settings.log_level, settings.log_file_path, settings.log_json)
    run()
