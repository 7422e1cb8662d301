import logging

logger = logging.getLogger("orbitlab")
