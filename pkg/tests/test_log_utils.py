from __future__ import annotations

import logging
import sys
import unittest
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from risk_roadmap.log_utils import clean_log_from_config, make_clean_log


class CleanLogModesTest(unittest.TestCase):
    def setUp(self) -> None:
        self.logger = logging.getLogger("risk_roadmap.test_log_utils")
        self.logger.setLevel(logging.DEBUG)

    def test_clean_mode_keeps_emoji_and_hides_quiet_messages(self):
        log = make_clean_log(logger=self.logger)
        with self.assertLogs(self.logger, level="DEBUG") as captured:
            log("planning", "🚀")
            log("verbose detail", "💾", show_always=False)
        self.assertEqual([r.getMessage() for r in captured.records], ["🚀 planning"])

    def test_simple_mode_drops_emoji(self):
        log = make_clean_log(clean_logs=False, logger=self.logger)
        with self.assertLogs(self.logger, level="INFO") as captured:
            log("planning", "🚀")
        self.assertEqual(captured.records[0].getMessage(), "[Info] planning")

    def test_debug_mode_shows_everything(self):
        log = make_clean_log(debug=True, logger=self.logger)
        with self.assertLogs(self.logger, level="DEBUG") as captured:
            log("verbose detail", "💾", show_always=False)
        self.assertEqual(captured.records[0].levelno, logging.DEBUG)
        self.assertEqual(captured.records[0].getMessage(), "💾 verbose detail")

    def test_from_config(self):
        log = clean_log_from_config({"debug": False, "clean_logs": True})
        with self.assertLogs("risk_roadmap", level="INFO") as captured:
            log("done", "✅")
        self.assertEqual(captured.records[0].getMessage(), "✅ done")


if __name__ == "__main__":
    unittest.main()
