import { ApiClient } from "./api";
import { UiClient } from "./client";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("server") ?? `http://${window.location.hostname}:8000`;

const host = document.getElementById("app");
if (!host) throw new Error("missing #app mount point");

void new UiClient(new ApiClient(baseUrl), host).start();
