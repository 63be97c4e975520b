# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


from __future__ import annotations

from typing import Any
from typing import Dict
from typing import List
from typing import Optional

import tinydb
import tinydb.table

import dndelab.db.base
import dndelab.models.report


class DatabaseReports(dndelab.db.base.Database):
    """Verification reports keyed by (suite, config digest)

    The pattern is:

    with DatabaseReports(Path to db) as db:
        db.push_report(report, digest)
    """

    def __init__(self, db_path: str):
        super(DatabaseReports, self).__init__(db_path, db_label="reports")

    @classmethod
    def construct_query(cls, suite: str, digest: str) -> tinydb.table.QueryLike:
        entry = tinydb.Query()
        return (entry.suite == suite) & (entry.digest == digest)

    @classmethod
    def construct_complex_query(
            cls,
            suite: Optional[str] = None,
            passed: Optional[bool] = None,
            digest: Optional[str] = None,
    ) -> tinydb.table.QueryLike | None:
        entry = tinydb.Query()
        ql = None

        if suite is not None:
            ql = entry.suite == suite

        if passed is not None:
            q = entry.passed == passed
            ql = q if ql is None else ql & q

        if digest is not None:
            q = entry.digest == digest
            ql = q if ql is None else ql & q

        return ql

    def push_report(self, report: dndelab.models.report.Report, digest: str) -> Dict[str, Any]:
        """Inserts the report, replacing an older one for the same suite and configuration

        Returns:
            The stored document
        """
        doc = {
            "suite": report.suite,
            "digest": digest,
            "passed": report.passed,
            "failed": [c.name for c in report.failed_checks()],
            "report": report.to_dict(),
        }
        self.upsert(doc, self.construct_query(report.suite, digest))
        self._log.info(f"Stored {report.suite} report for {report.params_echo.label()} passed={report.passed}")
        return doc

    def query_reports(
            self,
            suite: Optional[str] = None,
            passed: Optional[bool] = None,
            digest: Optional[str] = None,
    ) -> List[Dict[str, Any]]:
        ql = self.construct_complex_query(suite=suite, passed=passed, digest=digest)
        return [dict(x) for x in self.query(ql)]

    def load_reports(self, suite: Optional[str] = None) -> List[dndelab.models.report.Report]:
        return [dndelab.models.report.Report.model_validate(x["report"])
                for x in self.query_reports(suite=suite)]
