/** Frozen payloads produced by the pipeline CLI on the bundled simulator.
 *
 * whatifCliRaw is the exact stdout of:
 *   perfce whatif --sem sem.json --data anomaly.csv --target tps \
 *     --set cpu_load=30.0,io_latency=8.0 --window 120:180
 * diagnoseCliRaw is the exact stdout of:
 *   perfce diagnose --sem sem.json --data anomaly.csv --target tps \
 *     --window 120:180 --top 5
 * (anomaly.csv: database_restore episode, seed 5; sem trained on the
 * seed-7 protocol trace with the true graph.)
 */

import type { DiagnosisPayload, GraphPayload, WhatIfPayload } from '../src/types.js';

export const whatifCliRaw: string = "{\n  \"delta\": 37.18243260364392,\n  \"per_node_shifts\": {\n    \"buffer_hit_ratio\": 13.906550191226344,\n    \"checkpoint_age\": -21.008307498507648,\n    \"connections_active\": -12.502307204905136,\n    \"cpu_load\": -31.972876180578282,\n    \"io_latency\": -35.04231393628867,\n    \"io_queue_depth\": -28.01248928722379,\n    \"io_throughput\": 16.75285394929324,\n    \"lock_waits\": -17.930608054732534,\n    \"net_delay\": 0.186534138860603,\n    \"net_retrans\": 0.1933209084775016,\n    \"net_throughput\": -0.09344838961658297,\n    \"query_duration\": -46.59584384284929,\n    \"replication_lag\": -13.916415462250907,\n    \"slow_queries\": -35.49957651243531,\n    \"threads_running\": -15.770386046936608,\n    \"tps\": 37.18243260364392\n  },\n  \"y\": 139.12568277504687,\n  \"y_hat\": 176.3081153786908\n}\n";

export const diagnoseCliRaw: string = "{\n  \"entries\": [\n    {\n      \"blame\": 0.09260928857496117,\n      \"delta\": 40.312428578541045,\n      \"kpi\": \"query_duration\",\n      \"y_hat\": 179.4381113535879\n    },\n    {\n      \"blame\": 0.0640294060142128,\n      \"delta\": 37.25394143266803,\n      \"kpi\": \"slow_queries\",\n      \"y_hat\": 176.3796242077149\n    },\n    {\n      \"blame\": 0.00048332702758405855,\n      \"delta\": 23.745755014343104,\n      \"kpi\": \"io_latency\",\n      \"y_hat\": 162.87143778938997\n    },\n    {\n      \"blame\": 3.9072371840645237e-10,\n      \"delta\": 18.252547030490547,\n      \"kpi\": \"io_queue_depth\",\n      \"y_hat\": 157.37822980553742\n    },\n    {\n      \"blame\": 3.8270827771263e-26,\n      \"delta\": 13.480305343011338,\n      \"kpi\": \"cpu_load\",\n      \"y_hat\": 152.6059881180582\n    }\n  ],\n  \"observed_y\": 139.12568277504687,\n  \"target\": \"tps\"\n}\n";

export const whatifFixture: WhatIfPayload = JSON.parse(whatifCliRaw);

export const diagnoseFixture: DiagnosisPayload = JSON.parse(diagnoseCliRaw);

export const graphFixture: GraphPayload = JSON.parse("{\n  \"baseline_means\": {\n    \"buffer_hit_ratio\": 89.98712956993072,\n    \"chaos_cpu_stress\": 0.0,\n    \"chaos_io_stress\": 0.0,\n    \"chaos_memory_stress\": 0.0,\n    \"chaos_network_delay\": 0.0,\n    \"chaos_workload\": 0.0,\n    \"checkpoint_age\": 29.94464816396272,\n    \"connections_active\": 39.96851027974255,\n    \"cpu_load\": 29.99827552563505,\n    \"io_latency\": 7.936575541999072,\n    \"io_queue_depth\": 9.939095566059132,\n    \"io_throughput\": 150.05210311550127,\n    \"lock_waits\": 5.940517087326984,\n    \"mem_free\": 60.043243332629956,\n    \"mem_page_faults\": 20.01945315440114,\n    \"net_delay\": 12.024993675385046,\n    \"net_retrans\": 4.035836876363223,\n    \"net_throughput\": 120.05240073031958,\n    \"qps\": 199.97826944282573,\n    \"query_duration\": 50.02480419718428,\n    \"replication_lag\": 14.98144492992494,\n    \"slow_queries\": 7.949429271032827,\n    \"swap_activity\": 4.9352055555036625,\n    \"threads_running\": 24.997683491511566,\n    \"tps\": 179.8228782905976\n  },\n  \"edges\": [\n    [\n      \"chaos_cpu_stress\",\n      \"cpu_load\"\n    ],\n    [\n      \"chaos_io_stress\",\n      \"io_latency\"\n    ],\n    [\n      \"chaos_memory_stress\",\n      \"mem_free\"\n    ],\n    [\n      \"chaos_network_delay\",\n      \"net_delay\"\n    ],\n    [\n      \"chaos_network_delay\",\n      \"net_retrans\"\n    ],\n    [\n      \"chaos_workload\",\n      \"qps\"\n    ],\n    [\n      \"cpu_load\",\n      \"slow_queries\"\n    ],\n    [\n      \"cpu_load\",\n      \"threads_running\"\n    ],\n    [\n      \"io_latency\",\n      \"buffer_hit_ratio\"\n    ],\n    [\n      \"io_latency\",\n      \"checkpoint_age\"\n    ],\n    [\n      \"io_latency\",\n      \"io_queue_depth\"\n    ],\n    [\n      \"io_latency\",\n      \"lock_waits\"\n    ],\n    [\n      \"io_latency\",\n      \"replication_lag\"\n    ],\n    [\n      \"io_latency\",\n      \"slow_queries\"\n    ],\n    [\n      \"io_queue_depth\",\n      \"checkpoint_age\"\n    ],\n    [\n      \"io_queue_depth\",\n      \"io_throughput\"\n    ],\n    [\n      \"io_queue_depth\",\n      \"slow_queries\"\n    ],\n    [\n      \"lock_waits\",\n      \"checkpoint_age\"\n    ],\n    [\n      \"lock_waits\",\n      \"net_retrans\"\n    ],\n    [\n      \"mem_free\",\n      \"buffer_hit_ratio\"\n    ],\n    [\n      \"mem_free\",\n      \"mem_page_faults\"\n    ],\n    [\n      \"mem_free\",\n      \"swap_activity\"\n    ],\n    [\n      \"net_delay\",\n      \"net_throughput\"\n    ],\n    [\n      \"net_delay\",\n      \"query_duration\"\n    ],\n    [\n      \"net_delay\",\n      \"replication_lag\"\n    ],\n    [\n      \"net_retrans\",\n      \"net_delay\"\n    ],\n    [\n      \"net_throughput\",\n      \"query_duration\"\n    ],\n    [\n      \"qps\",\n      \"io_queue_depth\"\n    ],\n    [\n      \"qps\",\n      \"io_throughput\"\n    ],\n    [\n      \"qps\",\n      \"lock_waits\"\n    ],\n    [\n      \"qps\",\n      \"net_throughput\"\n    ],\n    [\n      \"qps\",\n      \"threads_running\"\n    ],\n    [\n      \"qps\",\n      \"tps\"\n    ],\n    [\n      \"query_duration\",\n      \"tps\"\n    ],\n    [\n      \"slow_queries\",\n      \"lock_waits\"\n    ],\n    [\n      \"slow_queries\",\n      \"query_duration\"\n    ],\n    [\n      \"swap_activity\",\n      \"cpu_load\"\n    ],\n    [\n      \"threads_running\",\n      \"connections_active\"\n    ]\n  ],\n  \"node_kinds\": {\n    \"buffer_hit_ratio\": \"kpi\",\n    \"chaos_cpu_stress\": \"chaos-variable\",\n    \"chaos_io_stress\": \"chaos-variable\",\n    \"chaos_memory_stress\": \"chaos-variable\",\n    \"chaos_network_delay\": \"chaos-variable\",\n    \"chaos_workload\": \"chaos-variable\",\n    \"checkpoint_age\": \"kpi\",\n    \"connections_active\": \"kpi\",\n    \"cpu_load\": \"kpi\",\n    \"io_latency\": \"kpi\",\n    \"io_queue_depth\": \"kpi\",\n    \"io_throughput\": \"kpi\",\n    \"lock_waits\": \"kpi\",\n    \"mem_free\": \"kpi\",\n    \"mem_page_faults\": \"kpi\",\n    \"net_delay\": \"kpi\",\n    \"net_retrans\": \"kpi\",\n    \"net_throughput\": \"kpi\",\n    \"qps\": \"kpi\",\n    \"query_duration\": \"kpi\",\n    \"replication_lag\": \"kpi\",\n    \"slow_queries\": \"kpi\",\n    \"swap_activity\": \"kpi\",\n    \"threads_running\": \"kpi\",\n    \"tps\": \"kpi\"\n  },\n  \"nodes\": [\n    \"chaos_cpu_stress\",\n    \"chaos_io_stress\",\n    \"chaos_memory_stress\",\n    \"chaos_network_delay\",\n    \"chaos_workload\",\n    \"buffer_hit_ratio\",\n    \"checkpoint_age\",\n    \"connections_active\",\n    \"cpu_load\",\n    \"io_latency\",\n    \"io_queue_depth\",\n    \"io_throughput\",\n    \"lock_waits\",\n    \"mem_free\",\n    \"mem_page_faults\",\n    \"net_delay\",\n    \"net_retrans\",\n    \"net_throughput\",\n    \"qps\",\n    \"query_duration\",\n    \"replication_lag\",\n    \"slow_queries\",\n    \"swap_activity\",\n    \"threads_running\",\n    \"tps\"\n  ]\n}\n");
