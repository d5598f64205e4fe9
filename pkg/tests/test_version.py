# version.json must track the package version and every module in src/critcharge
import json
import os
import re

from critcharge import __version__
from test_helpers import NumericTestBase

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
PACKAGE_DIR = os.path.join(ROOT, "src", "critcharge")


class TestVersionLedger(NumericTestBase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        with open(os.path.join(ROOT, "version.json"), encoding="utf-8") as handle:
            cls.ledger = json.load(handle)

    def test_package_version_matches(self):
        self.assertEqual(self.ledger["version"], __version__)
        self.assertRegex(__version__, r"^\d{4}\.\d{1,2}\.\d{1,2}$")

    def test_every_module_listed(self):
        modules = sorted(name for name in os.listdir(PACKAGE_DIR) if name.endswith(".py"))
        self.assertEqual(sorted(self.ledger["files"]), modules)

    def test_file_versions_not_newer_than_package(self):
        def key(version):
            return tuple(int(part) for part in version.split("."))

        for name, version in self.ledger["files"].items():
            with self.subTest(file=name):
                self.assertTrue(re.match(r"^\d{4}\.\d{1,2}\.\d{1,2}$", version))
                self.assertLessEqual(key(version), key(__version__))
