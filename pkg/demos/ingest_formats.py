"""
Reading XES and CSV event logs
==============================

The same three cases written as XES and as CSV, parsed back and compared.
"""
import io

import flowareas as fa

xes = b"""<?xml version="1.0" encoding="UTF-8"?>
<log xmlns="http://www.xes-standard.org/">
  <trace>
    <string key="concept:name" value="po-1"/>
    <string key="Item Type" value="Standard"/>
    <event><string key="concept:name" value="Create"/><date key="time:timestamp" value="2018-01-02T10:00:00+01:00"/></event>
    <event><string key="concept:name" value="Approve"/><date key="time:timestamp" value="2018-01-02T12:00:00+01:00"/></event>
  </trace>
  <trace>
    <string key="concept:name" value="po-2"/>
    <string key="Item Type" value="Service"/>
    <event><string key="concept:name" value="Create"/><date key="time:timestamp" value="2018-01-03T09:00:00Z"/></event>
  </trace>
  <trace>
    <string key="concept:name" value="po-3"/>
    <event><string key="concept:name" value="Create"/><date key="time:timestamp" value="2018-01-04T09:00:00Z"/></event>
    <event><string key="concept:name" value="Approve"/><date key="time:timestamp" value="2018-01-04T08:00:00Z"/></event>
  </trace>
</log>
"""
log = fa.parse_xes(xes)
for case in log.cases:
    # po-3 is reordered by timestamp; po-3 has no Item Type
    print(case.id, case.activities, {k: v.canonical for k, v in case.attributes.items()})

buf = io.StringIO()
mapping = fa.CsvMapping(time_col="timestamp")
fa.write_csv(log, buf, mapping)
print(buf.getvalue())

again = fa.parse_csv(io.StringIO(buf.getvalue()), mapping)
print([c.activities for c in again.cases] == [c.activities for c in log.cases])

# the binary encoding of the parsed log
m = fa.encode(log)
print(m.column_names)
print(m.rows)
