import logging
import os

from src.config import LOG_DIR, LOG_LEVEL


def setup_logging(name="gamnet"):
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.INFO),
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=[
            logging.FileHandler(os.path.join(LOG_DIR, f"{name}.log")),
            logging.StreamHandler(),
        ],
    )
