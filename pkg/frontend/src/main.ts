import { App } from "./app.js";

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app mount point");

const scheme = location.protocol === "https:" ? "wss" : "ws";
const app = new App(`${scheme}://${location.host}/session`, root);
app.bindKeys(window);
